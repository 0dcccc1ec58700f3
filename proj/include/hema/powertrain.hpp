#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hema/errors.hpp"

namespace hema {

/// Gas-turbine fuel map f(P) = beta2 P^2 + beta1 P + beta0 (SI: kg/s, W).
struct FuelMapCoeffs {
  double beta2 = 0.0;  ///< kg s^-1 W^-2
  double beta1 = 0.0;  ///< kg s^-1 W^-1  (i.e. kg/J)
  double beta0 = 0.0;  ///< kg s^-1

  bool valid() const { return beta2 >= 0.0 && beta1 > 0.0; }
};

/// Electric-motor loss map h(P) = kappa2 P^2 + kappa1 P + kappa0: shaft power -> bus power.
struct LossMapCoeffs {
  double kappa2 = 0.0;  ///< W^-1
  double kappa1 = 1.0;  ///< dimensionless
  double kappa0 = 0.0;  ///< W

  bool valid() const { return kappa2 >= 0.0 && kappa1 > 0.0; }
};

/// Battery equivalent circuit (open-circuit voltage U, internal resistance R) and SOC band.
struct BatteryParams {
  double U = 0.0;      ///< V
  double R = 0.0;      ///< Ohm
  double E_min = 0.0;  ///< J
  double E_max = 0.0;  ///< J

  bool valid() const { return U > 0.0 && R > 0.0 && E_min < E_max; }
  /// Largest bus power the circuit can deliver, U^2 / (4R).
  double max_bus_power() const { return U * U / (4.0 * R); }
};

/// Shaft power limits, per gas-turbine/motor arrangement.
struct PowerLimits {
  double p_gt_min = 0.0;
  double p_gt_max = 0.0;
  double p_em_min = 0.0;
  double p_em_max = 0.0;

  bool valid() const { return p_gt_min <= p_gt_max && p_em_min <= p_em_max; }
};

/// Below this |kappa2| the loss map is treated as affine.
inline constexpr double kAffineKappa2 = 1e-15;

/// Radicands that are negative by at most this relative amount are treated as zero.
inline constexpr double kRadicandSlack = 1e-9;

inline double eval_fuel_rate(double p_gt, const FuelMapCoeffs& c) {
  return (c.beta2 * p_gt + c.beta1) * p_gt + c.beta0;
}

inline double fuel_rate_slope(double p_gt, const FuelMapCoeffs& c) {
  return 2.0 * c.beta2 * p_gt + c.beta1;
}

inline double eval_electrical_draw(double p_em, const LossMapCoeffs& c) {
  return (c.kappa2 * p_em + c.kappa1) * p_em + c.kappa0;
}

/// Battery power as a function of bus power, P_b = (U^2/2R)(1 - sqrt(1 - 4R h / U^2)).
///
/// Evaluated in the algebraically equivalent form 2h / (1 + sqrt(1 - 4Rh/U^2)), which does
/// not cancel for small h.
inline double battery_power_from_bus(double bus, const BatteryParams& b) {
  double arg = 1.0 - 4.0 * b.R * bus / (b.U * b.U);
  if (arg < 0.0) {
    if (arg < -kRadicandSlack) {
      std::ostringstream os;
      os << "bus power " << bus << " W exceeds battery limit " << b.max_bus_power() << " W";
      fail(ErrorKind::InfeasibleBatteryDraw, os.str());
    }
    arg = 0.0;
  }
  return 2.0 * bus / (1.0 + std::sqrt(arg));
}

/// g(P_em): battery discharge power needed to deliver motor shaft power p_em.
inline double battery_power(double p_em, const LossMapCoeffs& c, const BatteryParams& b) {
  return battery_power_from_bus(eval_electrical_draw(p_em, c), b);
}

/// Bus power obtained from battery power p_b: P_b - (R/U^2) P_b^2 (inverse of the circuit).
inline double bus_power_from_battery(double p_b, const BatteryParams& b) {
  return p_b - b.R / (b.U * b.U) * p_b * p_b;
}

/**
 * @brief g^-1(P_b): motor shaft power delivered when the battery discharges at p_b.
 *
 * Uses the positive root of kappa2 P^2 + kappa1 P + kappa0 = P_b - (R/U^2) P_b^2, written as
 * 2(phi - kappa0) / (kappa1 + sqrt(kappa1^2 + 4 kappa2 (phi - kappa0))) so that the kappa2 > 0
 * branch degrades smoothly into the affine branch. For kappa2 below kAffineKappa2 the affine
 * closed form -(R/U^2 P_b^2 - P_b + kappa0)/kappa1 is used directly.
 */
inline double battery_inverse(double p_b, const LossMapCoeffs& c, const BatteryParams& b) {
  const double excess = bus_power_from_battery(p_b, b) - c.kappa0;
  if (std::abs(c.kappa2) < kAffineKappa2) return excess / c.kappa1;
  const double k1sq = c.kappa1 * c.kappa1;
  double disc = k1sq + 4.0 * c.kappa2 * excess;
  if (disc < 0.0) {
    if (disc < -kRadicandSlack * k1sq) {
      std::ostringstream os;
      os << "battery power " << p_b << " W below the range of g";
      fail(ErrorKind::OutOfRange, os.str());
    }
    disc = 0.0;
  }
  return 2.0 * excess / (c.kappa1 + std::sqrt(disc));
}

/// d g^-1 / d P_b. Infinite at the vertex of h.
inline double battery_inverse_slope(double p_b, const LossMapCoeffs& c, const BatteryParams& b) {
  const double dbus = 1.0 - 2.0 * b.R / (b.U * b.U) * p_b;
  const double p_em = battery_inverse(p_b, c, b);
  const double dh = 2.0 * c.kappa2 * p_em + c.kappa1;
  if (dh <= 0.0) return std::numeric_limits<double>::infinity();
  return dbus / dh;
}

/// Lower bound on motor power that keeps h (and therefore g) one-to-one and non-decreasing:
/// max{-p_em_max, -kappa1 / (2 kappa2)}.
inline double effective_em_lower_bound(const LossMapCoeffs& c, const PowerLimits& limits) {
  if (c.kappa2 < kAffineKappa2) return -limits.p_em_max;
  return std::max(-limits.p_em_max, -c.kappa1 / (2.0 * c.kappa2));
}

}  // namespace hema
