#pragma once

#include <cstdint>

namespace paraplan {

// Deterministic random stream keyed by a counter tuple. Every draw is a pure
// function of (key, position in stream), so candidate generation does not
// depend on evaluation order or thread count.
class KeyedRng {
 public:
  KeyedRng(std::uint64_t master_seed, std::uint64_t time_index,
           std::uint64_t restart, std::uint64_t iter, std::uint64_t candidate);

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double next_unit();

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double next_normal();

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace paraplan
