#include "paraplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paraplan {

double wrap_angle(double a) {
  const double r = std::remainder(a, 2.0 * std::numbers::pi);
  // remainder() lands in [-pi, pi]; fold the lower boundary onto +pi.
  return r <= -std::numbers::pi ? r + 2.0 * std::numbers::pi : r;
}

Vec2 to_ev_frame(const Pose2& anchor, const Vec2& world_pt) {
  const double dx = world_pt.x - anchor.x;
  const double dy = world_pt.y - anchor.y;
  const double c = std::cos(anchor.phi);
  const double s = std::sin(anchor.phi);
  return {c * dx + s * dy, -s * dx + c * dy};
}

Vec2 from_ev_frame(const Pose2& anchor, const Vec2& ev_pt) {
  const double c = std::cos(anchor.phi);
  const double s = std::sin(anchor.phi);
  return {anchor.x + c * ev_pt.x - s * ev_pt.y,
          anchor.y + s * ev_pt.x + c * ev_pt.y};
}

ChassisPolytope ChassisPolytope::rectangle(const VehicleParams& p) {
  ChassisPolytope out;
  out.planes_ = {
      {1.0, 0.0, p.front_extent()},
      {-1.0, 0.0, p.rear_extent()},
      {0.0, 1.0, p.half_width},
      {0.0, -1.0, p.half_width},
  };
  out.bounding_radius_ =
      std::hypot(std::max(p.front_extent(), p.rear_extent()), p.half_width);
  return out;
}

ExtrapolatedField extrapolate(std::span<const ObstaclePoint> pts, int H,
                              double T_s, const Pose2& anchor) {
  if (H < 0) throw std::invalid_argument("horizon must be non-negative");
  ExtrapolatedField field;
  field.anchor = anchor;
  field.H = H;
  field.n_points = static_cast<int>(pts.size());
  field.T_s = T_s;
  field.positions.resize(static_cast<std::size_t>(H + 1) * pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const double step_x = T_s * pts[j].speed * std::cos(pts[j].heading);
    const double step_y = T_s * pts[j].speed * std::sin(pts[j].heading);
    for (int h = 0; h <= H; ++h) {
      field.positions[static_cast<std::size_t>(h) * pts.size() + j] = {
          pts[j].x + h * step_x, pts[j].y + h * step_y};
    }
  }
  return field;
}

bool collision(const Pose2& pose, std::span<const Vec2> pts,
               const ChassisPolytope& chassis) {
  const double c = std::cos(pose.phi);
  const double s = std::sin(pose.phi);
  const double r2 = chassis.bounding_radius() * chassis.bounding_radius();
  for (const auto& m : pts) {
    const double dx = m.x - pose.x;
    const double dy = m.y - pose.y;
    if (dx * dx + dy * dy >= r2) continue;
    const Vec2 body{c * dx + s * dy, -s * dx + c * dy};
    if (chassis.contains(body)) return true;
  }
  return false;
}

bool collision(const Pose2& pose, std::span<const Vec2> pts,
               const VehicleParams& p) {
  return collision(pose, pts, ChassisPolytope::rectangle(p));
}

}  // namespace paraplan
