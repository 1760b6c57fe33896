#include "paraplan/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paraplan {

void VehicleParams::validate() const {
  if (!(l_f > 0.0) || !(l_r > 0.0)) {
    throw std::invalid_argument("axle distances must be positive");
  }
  if (!(delta_max > 0.0 && delta_max < std::numbers::pi / 2.0)) {
    throw std::invalid_argument("delta_max must lie in (0, pi/2)");
  }
  if (!(delta_rate_max > 0.0)) {
    throw std::invalid_argument("delta_rate_max must be positive");
  }
  if (!(u_v_min < 0.0 && 0.0 < u_v_max)) {
    throw std::invalid_argument("acceleration range must straddle zero");
  }
  if (!(overhang_front >= 0.0 && overhang_rear >= 0.0 && half_width > 0.0)) {
    throw std::invalid_argument("chassis dimensions out of range");
  }
  if (!(T_s > 0.0)) {
    throw std::invalid_argument("T_s must be positive");
  }
}

Controls map_controls(const ControlAction& a, const ActuatorState& act,
                      const VehicleParams& p) {
  const double a0 = std::clamp(a.a0, -1.0, 1.0);
  const double a1 = std::clamp(a.a1, -1.0, 1.0);

  const double window = p.delta_rate_max * p.T_s;
  double delta = std::clamp(p.delta_max * a0, act.delta - window, act.delta + window);
  delta = std::clamp(delta, -p.delta_max, p.delta_max);

  // Lerp form keeps both endpoints exact: a1=-1 -> u_v_min, a1=+1 -> u_v_max.
  const double w = 0.5 * (a1 + 1.0);
  const double u_v = (1.0 - w) * p.u_v_min + w * p.u_v_max;
  return {delta, u_v};
}

VehicleState step(const VehicleState& z, double delta, double u_v,
                  const VehicleParams& p) {
  // With sideslip beta = atan(l_r tan(delta) / (l_f + l_r)) and tb = tan(beta):
  //   cos(phi + beta) / cos(beta) = cos(phi) - tb sin(phi)
  //   sin(phi + beta) / cos(beta) = sin(phi) + tb cos(phi)
  // so beta itself never has to be evaluated.
  const double tan_delta = std::tan(delta);
  const double tb = p.l_r * tan_delta / (p.l_f + p.l_r);
  const double c = std::cos(z.phi);
  const double s = std::sin(z.phi);

  VehicleState out;
  out.x = z.x + p.T_s * z.v * (c - tb * s);
  out.y = z.y + p.T_s * z.v * (s + tb * c);
  out.phi = z.phi + p.T_s * z.v * tan_delta / (p.l_f + p.l_r);
  out.v = z.v + p.T_s * u_v;
  return out;
}

double idle_longitudinal(const VehicleParams& p) {
  return -1.0 - 2.0 * p.u_v_min / (p.u_v_max - p.u_v_min);
}

}  // namespace paraplan
