#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "hema/errors.hpp"

namespace hema {

/// ISA troposphere static temperature, K.
inline double isa_temperature(double altitude_m) { return 288.15 - 0.0065 * altitude_m; }

/// ISA troposphere density, kg/m^3.
inline double isa_density(double altitude_m) {
  return 1.225 * std::pow(isa_temperature(altitude_m) / 288.15, 4.2559);
}

/**
 * @brief Point-mass aerodynamic and mass properties.
 *
 * Polynomial fits are in degrees, matching how they are tabulated. The drive-power
 * coefficients only involve the ratios a2/b1^2, a1/b1 and b0/b1, which are invariant under
 * a change of angle unit, so no conversion is needed for them; degrees only appear in the
 * recovered angle of attack and its bounds.
 */
struct AeroParams {
  double a0 = 0.029;
  double a1 = 0.004;    ///< per deg
  double a2 = 5.3e-4;   ///< per deg^2
  double b0 = 0.43;
  double b1 = 0.11;     ///< per deg
  double S = 77.3;      ///< m^2
  double rho = 1.225;   ///< kg/m^3
  double grav = 9.81;   ///< m/s^2
  double alpha_min = -3.9;  ///< deg
  double alpha_max = 10.0;  ///< deg
  int n_arrangements = 4;
  bool use_isa_density = false;  ///< density from altitude instead of the constant rho

  bool valid() const {
    return a2 > 0.0 && b1 > 0.0 && S > 0.0 && rho > 0.0 && grav > 0.0 && alpha_min < alpha_max &&
           n_arrangements >= 1;
  }

  double density(double altitude_m) const {
    return use_isa_density ? isa_density(altitude_m) : rho;
  }
};

struct FlightPoint {
  double v = 0.0;      ///< true airspeed, m/s
  double gamma = 0.0;  ///< flight-path angle, rad
  double h = 0.0;      ///< altitude, m
};

/// Sampled flight path. steps has N+1 entries for an N-stage mission.
struct FlightPlan {
  double delta = 10.0;
  std::vector<FlightPoint> steps;

  std::size_t stages() const { return steps.empty() ? 0 : steps.size() - 1; }
  double duration() const { return delta * static_cast<double>(stages()); }

  void validate() const {
    require(delta > 0.0, ErrorKind::InvalidArgument, "flight plan: delta must be positive");
    require(steps.size() >= 2, ErrorKind::InvalidArgument, "flight plan needs at least two points");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto& s = steps[i];
      if (!(s.v > 0.0) || !(std::abs(s.gamma) < std::numbers::pi / 2)) {
        std::ostringstream os;
        os << "flight plan point " << i << ": need v > 0 and |gamma| < pi/2";
        fail(ErrorKind::InvalidArgument, os.str());
      }
    }
  }

  /// Remaining plan from step k onward (used by the shrinking horizon).
  FlightPlan tail(std::size_t k) const {
    FlightPlan p;
    p.delta = delta;
    p.steps.assign(steps.begin() + static_cast<std::ptrdiff_t>(k), steps.end());
    return p;
  }
};

/// Flight-path angle from an altitude/speed history: gamma_i = asin((h_{i+1} - h_i)/(v_i delta)).
/// The last point repeats the previous angle.
inline void derive_flight_path_angles(FlightPlan& plan) {
  const auto n = plan.steps.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double climb = (plan.steps[i + 1].h - plan.steps[i].h) / (plan.steps[i].v * plan.delta);
    plan.steps[i].gamma = std::asin(std::clamp(climb, -1.0, 1.0));
  }
  if (n >= 2) plan.steps[n - 1].gamma = plan.steps[n - 2].gamma;
}

/// Drive-power coefficients P_drv = eta2 m^2 + eta1 m + eta0 for one stage.
struct StageEta {
  double eta2 = 0.0;  ///< W/kg^2
  double eta1 = 0.0;  ///< W/kg
  double eta0 = 0.0;  ///< W

  StageEta scaled(double factor) const { return {eta2 * factor, eta1 * factor, eta0 * factor}; }
};

inline double drive_power(double m, const StageEta& eta) {
  return (eta.eta2 * m + eta.eta1) * m + eta.eta0;
}

inline double drive_power_slope(double m, const StageEta& eta) {
  return 2.0 * eta.eta2 * m + eta.eta1;
}

namespace detail {
inline double drag_poly(double alpha_deg, const AeroParams& p) {
  return (p.a2 * alpha_deg + p.a1) * alpha_deg + p.a0;
}
inline double lift_poly(double alpha_deg, const AeroParams& p) { return p.b1 * alpha_deg + p.b0; }

inline void check_alpha(double alpha_deg, const AeroParams& p) {
  if (alpha_deg < p.alpha_min || alpha_deg > p.alpha_max) {
    std::ostringstream os;
    os << "alpha " << alpha_deg << " deg outside [" << p.alpha_min << ", " << p.alpha_max << "]";
    fail(ErrorKind::AlphaOutOfRange, os.str());
  }
}

/// Stage kinematics shared by the eta coefficients and the alpha recovery.
struct StageKinematics {
  double v;
  double gamma;
  double rho;
  double dgamma;  ///< (gamma_{i+1} - gamma_i) / delta
  double dv2;     ///< (v_{i+1}^2 - v_i^2) / delta
  double normal;  ///< v dgamma + g cos(gamma): normal acceleration the lift must supply
};

inline StageKinematics kinematics(std::size_t i, const FlightPlan& plan, const AeroParams& p) {
  if (i + 1 >= plan.steps.size()) {
    std::ostringstream os;
    os << "stage " << i << " out of range for a plan with " << plan.stages() << " stages";
    fail(ErrorKind::OutOfRange, os.str());
  }
  const auto& a = plan.steps[i];
  const auto& b = plan.steps[i + 1];
  StageKinematics k{};
  k.v = a.v;
  k.gamma = a.gamma;
  k.rho = p.density(a.h);
  k.dgamma = (b.gamma - a.gamma) / plan.delta;
  k.dv2 = (b.v * b.v - a.v * a.v) / plan.delta;
  k.normal = a.v * k.dgamma + p.grav * std::cos(a.gamma);
  return k;
}
}  // namespace detail

inline double drag_coeff(double alpha_deg, const AeroParams& p) {
  detail::check_alpha(alpha_deg, p);
  return detail::drag_poly(alpha_deg, p);
}

inline double lift_coeff(double alpha_deg, const AeroParams& p) {
  detail::check_alpha(alpha_deg, p);
  return detail::lift_poly(alpha_deg, p);
}

/// Whole-aircraft drive-power coefficients for stage i, with angle of attack eliminated.
inline StageEta stage_eta(std::size_t i, const FlightPlan& plan, const AeroParams& p) {
  const auto k = detail::kinematics(i, plan, p);
  const double b1sq = p.b1 * p.b1;
  StageEta e;
  e.eta2 = 2.0 * p.a2 * k.normal * k.normal / (b1sq * k.rho * p.S * k.v);
  e.eta1 = 0.5 * k.dv2 + p.grav * std::sin(k.gamma) * k.v -
           2.0 * p.a2 * p.b0 * k.normal * k.v / b1sq + p.a1 / p.b1 * k.normal * k.v;
  e.eta0 = 0.5 * k.rho * p.S * k.v * k.v * k.v *
           (p.a2 * p.b0 * p.b0 / b1sq - p.a1 * p.b0 / p.b1 + p.a0);
  if (!(e.eta2 > 0.0)) {
    std::ostringstream os;
    os << "stage " << i << ": zero normal load factor, drive power is not strictly convex in mass";
    fail(ErrorKind::InvalidArgument, os.str());
  }
  return e;
}

struct AlphaCheck {
  double alpha_deg = 0.0;
  bool in_range = true;
};

/// Angle of attack that satisfies the vertical force balance at mass m (thrust lift neglected).
inline AlphaCheck recover_alpha(std::size_t i, double m, const FlightPlan& plan, const AeroParams& p) {
  const auto k = detail::kinematics(i, plan, p);
  const double cl = 2.0 * m * k.normal / (k.rho * p.S * k.v * k.v);
  AlphaCheck out;
  out.alpha_deg = (cl - p.b0) / p.b1;
  out.in_range = out.alpha_deg >= p.alpha_min && out.alpha_deg <= p.alpha_max;
  return out;
}

/// Drive power from the un-eliminated model: kinetic + potential rate + drag at a given alpha.
/// Alpha is not range-checked so the identity can be examined anywhere.
inline double drive_power_at_alpha(std::size_t i, double m, double alpha_deg, const FlightPlan& plan,
                                   const AeroParams& p) {
  const auto k = detail::kinematics(i, plan, p);
  return 0.5 * m * k.dv2 + m * p.grav * std::sin(k.gamma) * k.v +
         0.5 * detail::drag_poly(alpha_deg, p) * k.rho * p.S * k.v * k.v * k.v;
}

}  // namespace hema
