#pragma once

#include <array>
#include <span>
#include <vector>

#include "paraplan/dynamics.hpp"

namespace paraplan {

// 4D target: planar position, heading and speed. World frame unless the
// surrounding context says otherwise.
struct GoalSetpoint {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double v = 0.0;
};

// Multilayer perceptron layout: 5 inputs, 2 outputs, arbitrary hidden sizes.
struct MlpArchitecture {
  std::vector<int> layer_sizes{5, 2, 2};

  // Throws std::invalid_argument unless there are >= 2 layers, the first has
  // 5 units, the last has 2, and every size is positive.
  void validate() const;
};

// Total number of weights and biases: sum over consecutive layer pairs of
// (n_in + 1) * n_out.
int param_count(const MlpArchitecture& arch);

// Feature normalization constants.
struct NormConstants {
  double d_xi = 30.0;
  double d_eta = 3.5;
  double d_phi = 2.0 * std::numbers::pi;
  double d_v = 120.0 / 3.6;
};

using FeatureVector = std::array<double, 5>;

// Normalized tracking errors of the EV against the goal, both expressed in
// the same anchor frame, plus the previous steering output. The heading error
// is wrapped to (-pi, pi] before scaling.
FeatureVector build_features(const VehicleState& ev_in_anchor,
                             const GoalSetpoint& goal_in_anchor,
                             double prev_a0, const NormConstants& nc);

// Fully connected perceptron evaluated over a flat parameter vector. Layout:
// per layer, weights row-major (out x in) then biases, layers concatenated
// input to output. tanh activates every layer including the output, so both
// action channels land strictly inside (-1, 1).
class MlpPolicy {
 public:
  static constexpr int kMaxWidth = 256;

  explicit MlpPolicy(MlpArchitecture arch);

  const MlpArchitecture& architecture() const { return arch_; }
  int param_count() const { return n_params_; }

  ControlAction forward(std::span<const double> theta,
                        const FeatureVector& s) const;

 private:
  MlpArchitecture arch_;
  int n_params_ = 0;
};

}  // namespace paraplan
