#pragma once

#include <numbers>

namespace paraplan {

// Constants of the kinematic 4-states-2-controls vehicle model. Defaults
// describe a passenger car with a 2.5 m wheelbase and a 3.8 m x 2 m chassis.
struct VehicleParams {
  double l_f = 1.1;  // CoG to front axle [m]
  double l_r = 1.4;  // CoG to rear axle [m]
  double delta_max = 40.0 * std::numbers::pi / 180.0;       // steering limit [rad]
  double delta_rate_max = 20.0 * std::numbers::pi / 180.0;  // steering rate limit [rad/s]
  double u_v_min = -100.0 / (3.8 * 3.6);  // strongest braking [m/s^2]
  double u_v_max = 100.0 / (7.4 * 3.6);   // strongest acceleration [m/s^2]
  double overhang_front = 0.7;  // front axle to chassis front [m]
  double overhang_rear = 0.6;   // rear axle to chassis rear [m]
  double half_width = 1.0;      // chassis half width [m]
  double T_s = 0.1;             // sampling time [s]

  double wheelbase() const { return l_f + l_r; }
  double front_extent() const { return l_f + overhang_front; }
  double rear_extent() const { return l_r + overhang_rear; }

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct VehicleState {
  double x = 0.0;    // [m]
  double y = 0.0;    // [m]
  double phi = 0.0;  // heading [rad], unwrapped accumulator
  double v = 0.0;    // signed speed [m/s], negative when reversing
};

// Normalized controller output, both channels in [-1, 1].
struct ControlAction {
  double a0 = 0.0;  // steering channel
  double a1 = 0.0;  // longitudinal channel
};

struct ActuatorState {
  double delta = 0.0;  // currently realized steering angle [rad]
};

struct Controls {
  double delta = 0.0;  // steering angle after rate and magnitude limits [rad]
  double u_v = 0.0;    // longitudinal acceleration [m/s^2]
};

// Maps a normalized action to physical controls. The commanded angle
// delta_max * a0 is saturated first by the rate window around act.delta and
// then by the absolute limit; a1 maps affinely onto [u_v_min, u_v_max] with
// exact endpoints. Out-of-range action components are clamped, not rejected.
Controls map_controls(const ControlAction& a, const ActuatorState& act,
                      const VehicleParams& p);

// One explicit Euler step of length p.T_s with derivatives evaluated at the
// pre-step state.
VehicleState step(const VehicleState& z, double delta, double u_v,
                  const VehicleParams& p);

// Longitudinal channel value whose affine image is exactly zero acceleration.
double idle_longitudinal(const VehicleParams& p);

}  // namespace paraplan
