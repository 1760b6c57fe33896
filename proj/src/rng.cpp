#include "paraplan/rng.hpp"

#include <cmath>
#include <numbers>

namespace paraplan {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t fold(std::uint64_t h, std::uint64_t field) {
  return mix64(h ^ (mix64(field) + kGamma + (h << 6) + (h >> 2)));
}

}  // namespace

KeyedRng::KeyedRng(std::uint64_t master_seed, std::uint64_t time_index,
                   std::uint64_t restart, std::uint64_t iter,
                   std::uint64_t candidate) {
  std::uint64_t h = mix64(master_seed + kGamma);
  h = fold(h, time_index);
  h = fold(h, restart);
  h = fold(h, iter);
  h = fold(h, candidate);
  state_ = h;
}

std::uint64_t KeyedRng::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double KeyedRng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double KeyedRng::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - next_unit();  // (0, 1], keeps the log finite
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

}  // namespace paraplan
