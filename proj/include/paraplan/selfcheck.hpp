#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paraplan/planner.hpp"

namespace paraplan {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Property and oracle checks behind `plan verify`. Each check pits a library
// code path against an independently coded oracle.
std::vector<CheckResult> run_selfchecks();

// Point-in-convex-polygon oracle for the chassis check: transforms the
// rectangle corners into the world frame and tests the point against the
// polygon edges. Returns nullopt when the point lies within `edge_margin` of
// an edge, where strictness conventions may differ.
std::optional<bool> chassis_oracle(const Pose2& pose, const Vec2& point,
                                   const VehicleParams& p,
                                   double edge_margin = 1e-9);

// Re-simulates a parameter vector over the snapshot horizon step by step from
// the public primitives, independently of Planner::rollout.
RolloutResult resimulate_rollout(std::span<const double> theta,
                                 const PlanningSnapshot& snap,
                                 const Planner& planner);

}  // namespace paraplan
