#pragma once

#include <cstdint>

namespace semicyclic {

/// Block-cyclic stream shape: `cycles` (K) cycles, each visiting `blocks` (m)
/// component distributions in fixed order, `block_size` (n) samples per visit.
struct ScheduleConfig {
  long cycles = 1;
  int blocks = 1;
  long block_size = 1;

  long total_steps() const noexcept { return cycles * blocks * block_size; }
  /// Steps each block receives over the whole run: K * n = T / m.
  long steps_per_block() const noexcept { return cycles * block_size; }
  void validate() const;

  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

/// Position of an iteration in the stream. All three fields are 1-based,
/// matching t(k, i, j) = (k-1) n m + (i-1) n + j.
struct BlockPosition {
  long cycle = 1;
  int block = 1;
  long step = 1;

  friend bool operator==(const BlockPosition&, const BlockPosition&) = default;
};

long schedule_index(long cycle, int block, long step, const ScheduleConfig& config);
inline long schedule_index(const BlockPosition& pos, const ScheduleConfig& config) {
  return schedule_index(pos.cycle, pos.block, pos.step, config);
}

/// Inverse of schedule_index; `t` is 1-based.
BlockPosition block_of_iteration(long t, const ScheduleConfig& config);

}  // namespace semicyclic
