#pragma once

#include <span>
#include <vector>

namespace semicyclic {

/// Prod experts algorithm with a fixed anchor expert (index 0).
///
/// Experts 1..K start at weight eta/K and are updated multiplicatively by
/// (1 + eta * (l(0) - l(j))); the anchor starts at 1 - eta and is never
/// touched. Weights are stored as logarithms so long horizons cannot
/// overflow; the update factor itself is exactly the multiplicative rule.
class ProdState {
 public:
  /// `experts` = K (not counting the anchor). Requires 0 < rate <= 1/(4 loss_bound).
  ProdState(int experts, double rate, double loss_bound);

  /// Arbitrary positive starting weights, anchor first.
  static ProdState with_weights(std::vector<double> weights, double rate, double loss_bound);

  int experts() const noexcept { return static_cast<int>(log_weights_.size()) - 1; }
  double rate() const noexcept { return rate_; }
  double loss_bound() const noexcept { return loss_bound_; }

  double weight(int j) const;
  double log_weight(int j) const { return log_weights_.at(static_cast<std::size_t>(j)); }
  std::vector<double> weights() const;
  /// p^j = q^j / sum_k q^k.
  std::vector<double> probabilities() const;
  /// Probability of expert `j` in a two-way choice against the anchor:
  /// q^j / (q^j + q^0).
  double probability_against_anchor(int j) const;

  /// Applies one round of losses l(0..K). Throws kContract if any |l(j)| > M.
  void update(std::span<const double> losses);

 private:
  ProdState() = default;
  std::vector<double> log_weights_;
  double rate_ = 0.0;
  double loss_bound_ = 0.0;
};

/// Functional form of ProdState::update.
ProdState prod_update(ProdState state, std::span<const double> losses);

/// Corollary learning rate (1 / 2M) sqrt(ln(K M T) / T).
double prod_corollary_rate(double loss_bound, int experts, long horizon);

/// Hedging rate nu = (1 / 2B) sqrt((m / T) ln(B T / m)).
double hedging_rate(double norm_bound, long total_steps, int blocks);

/// Cumulative bookkeeping for a Prod run on a fixed loss sequence.
struct ProdRun {
  double expected_loss = 0.0;            // sum_t sum_j p^j_t l_t(j)
  std::vector<double> expert_losses;     // sum_t l_t(j), anchor first
  std::vector<double> regret;            // expected_loss - expert_losses[j]
  ProdState final_state;
};

/// Runs Prod over `losses[t][j]` from the default initialisation.
ProdRun run_prod(std::span<const std::vector<double>> losses, double rate, double loss_bound);

/// Regret ceilings from the Prod analysis.
double prod_anchor_regret_bound(double rate);
double prod_expert_regret_bound(double rate, double loss_bound, int experts, long horizon);

}  // namespace semicyclic
