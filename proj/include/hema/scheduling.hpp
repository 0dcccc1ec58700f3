#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "hema/errors.hpp"
#include "hema/flight_dynamics.hpp"
#include "hema/interpolation.hpp"
#include "hema/powertrain.hpp"

namespace hema {

/// Fan map Omega(altitude, per-arrangement drive power) at a fixed Mach number.
struct FanMap {
  double mach = 0.55;
  double cp = 1000.0;  ///< J K^-1 kg^-1
  std::vector<double> altitudes;  ///< m, strictly increasing
  std::vector<double> powers;     ///< W, strictly increasing
  std::vector<double> omega;      ///< row-major [altitude][power], non-dimensional speed

  /// rad/s per unit Omega per sqrt(K): (156.7/100)(pi/30).
  static constexpr double kSpeedScale = 1.567 * std::numbers::pi / 30.0;

  double at(std::size_t ia, std::size_t ip) const { return omega[ia * powers.size() + ip]; }

  void validate() const {
    require(!altitudes.empty() && !powers.empty(), ErrorKind::InvalidArgument, "fan map: empty grid");
    require(omega.size() == altitudes.size() * powers.size(), ErrorKind::DimensionMismatch,
            "fan map: grid size does not match axes");
    require(interp::strictly_increasing(altitudes) && interp::strictly_increasing(powers),
            ErrorKind::InvalidArgument, "fan map: axes must be strictly increasing");
    for (std::size_t ia = 0; ia < altitudes.size(); ++ia)
      for (std::size_t ip = 1; ip < powers.size(); ++ip)
        require(at(ia, ip) >= at(ia, ip - 1), ErrorKind::InvalidArgument,
                "fan map: Omega must be non-decreasing in drive power");
  }

  /// Bilinear Omega lookup; no extrapolation.
  double omega_at(double altitude, double power) const {
    const auto ca = interp::locate(altitudes, altitude);
    if (!ca) {
      std::ostringstream os;
      os << "altitude " << altitude << " m outside fan map [" << altitudes.front() << ", "
         << altitudes.back() << "]";
      fail(ErrorKind::GridOutOfRange, os.str());
    }
    const auto cp_ = interp::locate(powers, power);
    if (!cp_) {
      std::ostringstream os;
      os << "drive power " << power << " W outside fan map [" << powers.front() << ", "
         << powers.back() << "]";
      fail(ErrorKind::GridOutOfRange, os.str());
    }
    const std::size_t a1 = altitudes.size() == 1 ? ca->lo : ca->lo + 1;
    const std::size_t p1 = powers.size() == 1 ? cp_->lo : cp_->lo + 1;
    const double lo = interp::lerp(at(ca->lo, cp_->lo), at(ca->lo, p1), cp_->frac);
    const double hi = interp::lerp(at(a1, cp_->lo), at(a1, p1), cp_->frac);
    return interp::lerp(lo, hi, ca->frac);
  }
};

/// Fan inlet total temperature T0(h) + v^2 / (2 cp).
inline double inlet_temperature(double altitude, double v, double cp) {
  return isa_temperature(altitude) + v * v / (2.0 * cp);
}

/// Shaft speed (rad/s) for a per-arrangement drive power at altitude h and airspeed v.
inline double shaft_speed(double altitude, double p_drv, double v, const FanMap& map) {
  const double big_omega = map.omega_at(altitude, p_drv);
  return FanMap::kSpeedScale * big_omega * std::sqrt(inlet_temperature(altitude, v, map.cp));
}

struct CoeffRow {
  double omega = 0.0;  ///< rad/s
  LossMapCoeffs loss;
  FuelMapCoeffs fuel;
};

/// Loss- and fuel-map coefficients tabulated at a set of shaft speeds.
struct CoeffTable {
  std::vector<CoeffRow> rows;

  void validate() const {
    require(!rows.empty(), ErrorKind::InvalidArgument, "coefficient table is empty");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].loss.valid() && rows[i].fuel.valid(), ErrorKind::InvalidArgument,
              "coefficient table row " + std::to_string(i) +
                  ": need kappa2 >= 0, kappa1 > 0, beta2 >= 0, beta1 > 0");
      if (i > 0)
        require(rows[i].omega > rows[i - 1].omega, ErrorKind::InvalidArgument,
                "coefficient table: shaft speeds must be strictly increasing");
    }
  }

  /// Piecewise-linear interpolation in shaft speed. A single-row table is speed independent.
  CoeffRow lookup(double w) const {
    if (rows.size() == 1) {
      CoeffRow r = rows.front();
      r.omega = w;
      return r;
    }
    if (w < rows.front().omega || w > rows.back().omega) {
      std::ostringstream os;
      os << "shaft speed " << w << " rad/s outside coefficient table [" << rows.front().omega
         << ", " << rows.back().omega << "]";
      fail(ErrorKind::CoeffOutOfTable, os.str());
    }
    std::vector<double> axis(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) axis[i] = rows[i].omega;
    const auto c = *interp::locate(axis, w);
    const auto& a = rows[c.lo];
    const auto& b = rows[c.lo + 1];
    const double t = c.frac;
    using interp::lerp;
    CoeffRow r;
    r.omega = w;
    r.loss = {lerp(a.loss.kappa2, b.loss.kappa2, t), lerp(a.loss.kappa1, b.loss.kappa1, t),
              lerp(a.loss.kappa0, b.loss.kappa0, t)};
    r.fuel = {lerp(a.fuel.beta2, b.fuel.beta2, t), lerp(a.fuel.beta1, b.fuel.beta1, t),
              lerp(a.fuel.beta0, b.fuel.beta0, t)};
    return r;
  }
};

/// Scheduled data for one stage. Powers are per arrangement.
struct StageData {
  StageEta eta;          ///< per-arrangement drive power coefficients (whole aircraft / n)
  LossMapCoeffs loss;
  FuelMapCoeffs fuel;
  double omega = 0.0;    ///< rad/s
  double p_drv_estimate = 0.0;  ///< per-arrangement drive power used for the speed lookup, W
  double p_em_min = 0.0;  ///< effective motor lower bound, W
  double p_em_max = 0.0;
  double p_b_min = 0.0;   ///< g_i(p_em_min)
  double p_b_max = 0.0;   ///< g_i(p_em_max)
};

using StageCoefficients = std::vector<StageData>;

/// Whole-aircraft drive power per stage at the given (per-stage) masses.
inline std::vector<double> estimate_drive_profile(const FlightPlan& plan, std::span<const double> masses,
                                                  const AeroParams& aero) {
  require(masses.size() == plan.stages(), ErrorKind::DimensionMismatch,
          "estimate_drive_profile: one mass per stage required");
  std::vector<double> out(plan.stages());
  for (std::size_t i = 0; i < out.size(); ++i) {
    require(masses[i] > 0.0, ErrorKind::InvalidArgument, "mass must be positive");
    out[i] = drive_power(masses[i], stage_eta(i, plan, aero));
  }
  return out;
}

/// Constant-mass prior: drive power of every stage evaluated at m0.
inline std::vector<double> estimate_drive_profile(const FlightPlan& plan, double m0, const AeroParams& aero) {
  std::vector<double> masses(plan.stages(), m0);
  return estimate_drive_profile(plan, masses, aero);
}

/// Completes a stage from its drive-power coefficients and interpolated maps.
inline StageData make_stage(const StageEta& eta_per_engine, const CoeffRow& row, double p_drv_estimate,
                            const PowerLimits& limits, const BatteryParams& battery) {
  StageData s;
  s.eta = eta_per_engine;
  s.loss = row.loss;
  s.fuel = row.fuel;
  s.omega = row.omega;
  s.p_drv_estimate = p_drv_estimate;
  s.p_em_min = std::max(limits.p_em_min, effective_em_lower_bound(row.loss, limits));
  s.p_em_max = limits.p_em_max;
  s.p_b_min = battery_power(s.p_em_min, row.loss, battery);
  s.p_b_max = battery_power(s.p_em_max, row.loss, battery);
  return s;
}

/// Maps consumed by the scheduler.
struct PowertrainMaps {
  FanMap fan;
  CoeffTable table;
};

/**
 * @brief Per-stage convex problem data along a flight plan.
 *
 * Shaft speed comes from the fan map at the per-arrangement drive power estimated at the given
 * masses; loss and fuel coefficients are interpolated at that speed.
 */
inline StageCoefficients schedule(const FlightPlan& plan, std::span<const double> masses,
                                  const PowertrainMaps& maps, const PowerLimits& limits,
                                  const AeroParams& aero, const BatteryParams& battery) {
  require(plan.stages() >= 1, ErrorKind::InvalidArgument, "schedule: empty flight plan");
  const auto total = estimate_drive_profile(plan, masses, aero);
  const double n = static_cast<double>(aero.n_arrangements);
  StageCoefficients out;
  out.reserve(total.size());
  for (std::size_t i = 0; i < total.size(); ++i) {
    const double per_engine = total[i] / n;
    const auto& pt = plan.steps[i];
    const double w = shaft_speed(pt.h, per_engine, pt.v, maps.fan);
    const auto row = maps.table.lookup(w);
    auto stage = make_stage(stage_eta(i, plan, aero).scaled(1.0 / n), row, per_engine, limits, battery);
    if (!stage.loss.valid() || !stage.fuel.valid())
      fail(ErrorKind::InvalidArgument, "stage " + std::to_string(i) + ": scheduled coefficients violate sign assumptions");
    out.push_back(stage);
  }
  return out;
}

inline StageCoefficients schedule(const FlightPlan& plan, double m0, const PowertrainMaps& maps,
                                  const PowerLimits& limits, const AeroParams& aero,
                                  const BatteryParams& battery) {
  require(m0 > 0.0, ErrorKind::InvalidArgument, "schedule: m0 must be positive");
  std::vector<double> masses(plan.stages(), m0);
  return schedule(plan, masses, maps, limits, aero, battery);
}

}  // namespace hema
