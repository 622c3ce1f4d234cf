#include "semicyclic/prod.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "semicyclic/error.hpp"

namespace semicyclic {

namespace {

void check_rate(double rate, double loss_bound) {
  if (!(loss_bound > 0.0) || !std::isfinite(loss_bound)) {
    throw_argument(fmt::format("Prod loss bound must be positive (got {})", loss_bound));
  }
  if (!(rate > 0.0) || rate > 1.0 / (4.0 * loss_bound) * (1.0 + 1e-12)) {
    throw_contract(fmt::format("Prod rate {} outside (0, 1/(4M)] with M = {}", rate, loss_bound));
  }
}

double log_sum_exp(const std::vector<double>& logs) {
  const double peak = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  for (double l : logs) total += std::exp(l - peak);
  return peak + std::log(total);
}

}  // namespace

ProdState::ProdState(int experts, double rate, double loss_bound)
    : rate_(rate), loss_bound_(loss_bound) {
  if (experts < 1) throw_argument("Prod needs at least one expert besides the anchor");
  check_rate(rate, loss_bound);
  log_weights_.assign(static_cast<std::size_t>(experts) + 1, std::log(rate / experts));
  log_weights_[0] = std::log1p(-rate);
}

ProdState ProdState::with_weights(std::vector<double> weights, double rate, double loss_bound) {
  if (weights.size() < 2) throw_argument("Prod needs an anchor and at least one expert");
  check_rate(rate, loss_bound);
  ProdState state;
  state.rate_ = rate;
  state.loss_bound_ = loss_bound;
  state.log_weights_.reserve(weights.size());
  for (double q : weights) {
    if (!(q > 0.0) || !std::isfinite(q)) throw_argument("Prod weights must be positive and finite");
    state.log_weights_.push_back(std::log(q));
  }
  return state;
}

double ProdState::weight(int j) const { return std::exp(log_weight(j)); }

std::vector<double> ProdState::weights() const {
  std::vector<double> q(log_weights_.size());
  std::transform(log_weights_.begin(), log_weights_.end(), q.begin(),
                 [](double l) { return std::exp(l); });
  return q;
}

std::vector<double> ProdState::probabilities() const {
  const double log_total = log_sum_exp(log_weights_);
  std::vector<double> p(log_weights_.size());
  std::transform(log_weights_.begin(), log_weights_.end(), p.begin(),
                 [log_total](double l) { return std::exp(l - log_total); });
  return p;
}

double ProdState::probability_against_anchor(int j) const {
  // q^j / (q^j + q^0) = 1 / (1 + exp(l0 - lj))
  const double diff = log_weights_.front() - log_weight(j);
  return 1.0 / (1.0 + std::exp(diff));
}

void ProdState::update(std::span<const double> losses) {
  if (losses.size() != log_weights_.size()) {
    throw_argument(fmt::format("Prod update needs {} losses, got {}", log_weights_.size(),
                               losses.size()));
  }
  const double slack = loss_bound_ * (1.0 + 1e-12);
  for (double l : losses) {
    if (!(std::abs(l) <= slack)) {
      throw_contract(fmt::format("Prod loss {} exceeds bound M = {}", l, loss_bound_));
    }
  }
  for (std::size_t j = 1; j < log_weights_.size(); ++j) {
    log_weights_[j] += std::log1p(rate_ * (losses[0] - losses[j]));
  }
}

ProdState prod_update(ProdState state, std::span<const double> losses) {
  state.update(losses);
  return state;
}

double prod_corollary_rate(double loss_bound, int experts, long horizon) {
  if (horizon < 1 || experts < 1 || !(loss_bound > 0.0)) {
    throw_argument("corollary rate needs M > 0, K >= 1, T >= 1");
  }
  const double log_term = std::log(experts * loss_bound * static_cast<double>(horizon));
  return std::sqrt(log_term / static_cast<double>(horizon)) / (2.0 * loss_bound);
}

double hedging_rate(double norm_bound, long total_steps, int blocks) {
  if (!(norm_bound > 0.0) || total_steps < 1 || blocks < 1) {
    throw_argument("hedging rate needs B > 0, T >= 1, m >= 1");
  }
  const double per_block = static_cast<double>(total_steps) / blocks;
  return std::sqrt(std::log(norm_bound * per_block) / per_block) / (2.0 * norm_bound);
}

ProdRun run_prod(std::span<const std::vector<double>> losses, double rate, double loss_bound) {
  if (losses.empty()) throw_argument("Prod run needs at least one round");
  const int experts = static_cast<int>(losses.front().size()) - 1;
  ProdRun run{0.0, std::vector<double>(losses.front().size(), 0.0), {},
              ProdState(experts, rate, loss_bound)};
  for (const auto& round : losses) {
    const auto p = run.final_state.probabilities();
    for (std::size_t j = 0; j < round.size(); ++j) {
      run.expected_loss += p[j] * round[j];
      run.expert_losses[j] += round[j];
    }
    run.final_state.update(round);
  }
  run.regret.resize(run.expert_losses.size());
  for (std::size_t j = 0; j < run.expert_losses.size(); ++j) {
    run.regret[j] = run.expected_loss - run.expert_losses[j];
  }
  return run;
}

double prod_anchor_regret_bound(double rate) { return 1.0 + rate; }

double prod_expert_regret_bound(double rate, double loss_bound, int experts, long horizon) {
  return 4.0 * rate * loss_bound * loss_bound * static_cast<double>(horizon) +
         std::log(experts / rate) / rate;
}

}  // namespace semicyclic
