#pragma once

#include <span>
#include <vector>

#include "paraplan/dynamics.hpp"

namespace paraplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
};

// 4D obstacle datum: planar position, heading and speed. Mission data keeps
// these in the world frame; after sensing they live in the EV-aligned frame
// of the planning tick (x = xi along the EV heading, y = eta lateral left).
struct ObstaclePoint {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // [rad], same frame as the position
  double speed = 0.0;    // [m/s]
};

// Minimal representative of an angle in (-pi, pi].
double wrap_angle(double a);

// Rigid transform into the frame anchored at `anchor` (translate, then rotate
// by -anchor.phi) and its exact inverse.
Vec2 to_ev_frame(const Pose2& anchor, const Vec2& world_pt);
Vec2 from_ev_frame(const Pose2& anchor, const Vec2& ev_pt);

// Half plane n . p < b; a point is inside a polytope when every inequality
// holds strictly, so boundary contact does not count as containment.
struct HalfPlane {
  double nx = 0.0;
  double ny = 0.0;
  double b = 0.0;
};

// Convex chassis outline in the body frame (origin at the CoG, x forward).
// Only the rectangle is instantiated; the half-plane list keeps the check
// open to refined outlines.
class ChassisPolytope {
 public:
  static ChassisPolytope rectangle(const VehicleParams& p);

  bool contains(const Vec2& body_pt) const {
    for (const auto& hp : planes_) {
      if (!(hp.nx * body_pt.x + hp.ny * body_pt.y < hp.b)) return false;
    }
    return !planes_.empty();
  }

  std::span<const HalfPlane> halfplanes() const { return planes_; }

  // Radius of a circle around the body origin containing the polytope;
  // points at or beyond it can never be strictly inside.
  double bounding_radius() const { return bounding_radius_; }

 private:
  std::vector<HalfPlane> planes_;
  double bounding_radius_ = 0.0;
};

// Obstacle positions advanced under constant velocity, one row per prediction
// step h = 0..H. Computed once per planning tick and never refreshed
// mid-horizon; all coordinates live in the anchor frame.
struct ExtrapolatedField {
  std::vector<Vec2> positions;  // (H+1) x n_points, row-major in h
  Pose2 anchor;
  int H = 0;
  int n_points = 0;
  double T_s = 0.1;

  std::span<const Vec2> at(int h) const {
    return std::span<const Vec2>(positions)
        .subspan(static_cast<std::size_t>(h) * n_points, n_points);
  }
};

ExtrapolatedField extrapolate(std::span<const ObstaclePoint> pts, int H,
                              double T_s, const Pose2& anchor = {});

// True iff some point lies strictly inside the chassis placed at `pose`.
bool collision(const Pose2& pose, std::span<const Vec2> pts,
               const ChassisPolytope& chassis);
bool collision(const Pose2& pose, std::span<const Vec2> pts,
               const VehicleParams& p);

}  // namespace paraplan
