#include "paraplan/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "paraplan/geometry.hpp"

namespace paraplan {

void MlpArchitecture::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("architecture needs at least 2 layers");
  }
  if (layer_sizes.front() != 5) {
    throw std::invalid_argument("input layer must have 5 units");
  }
  if (layer_sizes.back() != 2) {
    throw std::invalid_argument("output layer must have 2 units");
  }
  for (int n : layer_sizes) {
    if (n <= 0 || n > MlpPolicy::kMaxWidth) {
      throw std::invalid_argument("layer sizes must be in [1, 256]");
    }
  }
}

int param_count(const MlpArchitecture& arch) {
  int total = 0;
  for (std::size_t l = 0; l + 1 < arch.layer_sizes.size(); ++l) {
    total += (arch.layer_sizes[l] + 1) * arch.layer_sizes[l + 1];
  }
  return total;
}

FeatureVector build_features(const VehicleState& ev_in_anchor,
                             const GoalSetpoint& goal_in_anchor,
                             double prev_a0, const NormConstants& nc) {
  return {
      (goal_in_anchor.x - ev_in_anchor.x) / nc.d_xi,
      (goal_in_anchor.y - ev_in_anchor.y) / nc.d_eta,
      wrap_angle(goal_in_anchor.phi - ev_in_anchor.phi) / nc.d_phi,
      (goal_in_anchor.v - ev_in_anchor.v) / nc.d_v,
      prev_a0,
  };
}

MlpPolicy::MlpPolicy(MlpArchitecture arch) : arch_(std::move(arch)) {
  arch_.validate();
  n_params_ = paraplan::param_count(arch_);
}

ControlAction MlpPolicy::forward(std::span<const double> theta,
                                 const FeatureVector& s) const {
  if (static_cast<int>(theta.size()) != n_params_) {
    throw std::invalid_argument("parameter vector size mismatch");
  }
  std::array<double, kMaxWidth> buf_a;
  std::array<double, kMaxWidth> buf_b;
  std::copy(s.begin(), s.end(), buf_a.begin());
  double* cur = buf_a.data();
  double* nxt = buf_b.data();

  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < arch_.layer_sizes.size(); ++l) {
    const int n_in = arch_.layer_sizes[l];
    const int n_out = arch_.layer_sizes[l + 1];
    const double* weights = theta.data() + off;
    const double* biases = weights + static_cast<std::size_t>(n_in) * n_out;
    for (int o = 0; o < n_out; ++o) {
      const double* row = weights + static_cast<std::size_t>(o) * n_in;
      double acc = biases[o];
      for (int i = 0; i < n_in; ++i) acc += row[i] * cur[i];
      nxt[o] = std::tanh(acc);
    }
    off += static_cast<std::size_t>(n_in + 1) * n_out;
    std::swap(cur, nxt);
  }
  return {cur[0], cur[1]};
}

}  // namespace paraplan
