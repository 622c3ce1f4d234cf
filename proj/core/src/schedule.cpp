#include "semicyclic/schedule.hpp"

#include <fmt/format.h>

#include "semicyclic/error.hpp"

namespace semicyclic {

void ScheduleConfig::validate() const {
  if (cycles < 1 || blocks < 1 || block_size < 1) {
    throw_argument(fmt::format("schedule requires K, m, n >= 1 (got K={}, m={}, n={})", cycles,
                               blocks, block_size));
  }
}

long schedule_index(long cycle, int block, long step, const ScheduleConfig& config) {
  config.validate();
  if (cycle < 1 || cycle > config.cycles) {
    throw_argument(fmt::format("cycle index {} outside 1..{}", cycle, config.cycles));
  }
  if (block < 1 || block > config.blocks) {
    throw_argument(fmt::format("block index {} outside 1..{}", block, config.blocks));
  }
  if (step < 1 || step > config.block_size) {
    throw_argument(fmt::format("step index {} outside 1..{}", step, config.block_size));
  }
  return (cycle - 1) * config.block_size * config.blocks + (block - 1) * config.block_size + step;
}

BlockPosition block_of_iteration(long t, const ScheduleConfig& config) {
  config.validate();
  if (t < 1 || t > config.total_steps()) {
    throw_argument(fmt::format("iteration {} outside 1..{}", t, config.total_steps()));
  }
  const long zero_based = t - 1;
  const long per_cycle = config.block_size * config.blocks;
  BlockPosition pos;
  pos.cycle = zero_based / per_cycle + 1;
  const long within = zero_based % per_cycle;
  pos.block = static_cast<int>(within / config.block_size) + 1;
  pos.step = within % config.block_size + 1;
  return pos;
}

}  // namespace semicyclic
