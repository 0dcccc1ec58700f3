#pragma once

// Reference evaluations used by the tests. Each one is written from the closed-form model
// equations and shares no code with the library.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kU = 750.0;
inline constexpr double kR = 0.01;

/// Battery power for bus power h: (U^2/2R)(1 - sqrt(1 - 4Rh/U^2)), in the textbook form.
inline double g_of_bus(double h, double U = kU, double R = kR) {
  return U * U / (2.0 * R) * (1.0 - std::sqrt(1.0 - 4.0 * R * h / (U * U)));
}

inline double h_quad(double p, double k2, double k1, double k0) { return k2 * p * p + k1 * p + k0; }

inline double g(double p_em, double k2, double k1, double k0, double U = kU, double R = kR) {
  return g_of_bus(h_quad(p_em, k2, k1, k0), U, R);
}

/// Inverse of g: the square-root branch for k2 > 0 and the affine branch for k2 = 0.
inline double g_inv(double p_b, double k2, double k1, double k0, double U = kU, double R = kR) {
  if (k2 == 0.0) return -(R / (U * U) * p_b * p_b - p_b + k0) / k1;
  return -k1 / (2.0 * k2) +
         std::sqrt(-R * p_b * p_b / (k2 * U * U) + (p_b - k0) / k2 + k1 * k1 / (4.0 * k2 * k2));
}

/// Aerodynamic and kinematic data for one stage, angle fits per degree.
struct Aero {
  double a0 = 0.029, a1 = 0.004, a2 = 5.3e-4, b0 = 0.43, b1 = 0.11;
  double S = 77.3, rho = 1.225, grav = 9.81;
};

struct Stage {
  double v0, v1, gamma0, gamma1, delta;
};

/// Angle of attack (deg) from the vertical force balance.
inline double alpha_deg(const Stage& s, double m, const Aero& a) {
  const double dgamma = (s.gamma1 - s.gamma0) / s.delta;
  const double cl = 2.0 * (m * s.v0 * dgamma + m * a.grav * std::cos(s.gamma0)) / (a.rho * a.S * s.v0 * s.v0);
  return (cl - a.b0) / a.b1;
}

/// Drive power from the along-track balance with the drag polynomial at the given angle.
inline double drive_two_equation(const Stage& s, double m, const Aero& a) {
  const double al = alpha_deg(s, m, a);
  const double cd = a.a0 + a.a1 * al + a.a2 * al * al;
  const double dv2 = (s.v1 * s.v1 - s.v0 * s.v0) / s.delta;
  return 0.5 * m * dv2 + m * a.grav * std::sin(s.gamma0) * s.v0 + 0.5 * cd * a.rho * a.S * std::pow(s.v0, 3);
}

/// Level unaccelerated flight: closed forms of the three quadratic-in-mass coefficients.
struct Eta {
  double e2, e1, e0;
};
inline Eta cruise_eta(double v, const Aero& a) {
  const double b1sq = a.b1 * a.b1;
  return {2.0 * a.a2 * a.grav * a.grav / (b1sq * a.rho * a.S * v),
          a.a1 / a.b1 * a.grav * v - 2.0 * a.a2 * a.b0 * a.grav * v / b1sq,
          0.5 * a.rho * a.S * v * v * v * (a.a2 * a.b0 * a.b0 / b1sq - a.a1 * a.b0 / a.b1 + a.a0)};
}

/// Data for the independent mission oracle over a gridded motor power.
struct OcpStage {
  double e2, e1, e0;     // per-arrangement drive power coefficients
  double k2, k1, k0;     // loss map
  double b2, b1, b0;     // fuel map
  double pem_lo, pem_hi; // motor power interval
};

struct OcpInstance {
  std::vector<OcpStage> stages;
  double delta = 10.0, m0 = 0.0, E0 = 0.0, E_min = 0.0, E_max = 0.0, lambda = 0.0, m_dry = 0.0;
  double pgt_lo = 0.0, pgt_hi = 0.0;
  int n = 4;
  double U = kU, R = kR;
};

/**
 * Exhaustive search over a uniform grid of motor shaft power per stage for the original
 * equality-constrained dynamics. The gas turbine covers the remaining demand at the simulated
 * mass, never below its lower bound.
 */
inline double grid_search(const OcpInstance& p, int points) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, double, double)> rec = [&](std::size_t i, double m, double E) {
    if (i == p.stages.size()) {
      best = std::min(best, p.m0 - m - p.lambda * E);
      return;
    }
    const auto& s = p.stages[i];
    const double demand = s.e2 * m * m + s.e1 * m + s.e0;
    for (int k = 0; k < points; ++k) {
      const double pem = s.pem_lo + (s.pem_hi - s.pem_lo) * k / (points - 1);
      const double E1 = E - g(pem, s.k2, s.k1, s.k0, p.U, p.R) * p.delta;
      if (E1 < p.E_min || E1 > p.E_max) continue;
      const double pgt = std::max(p.pgt_lo, demand - pem);
      if (pgt > p.pgt_hi) continue;
      const double m1 = m - p.n * (s.b2 * pgt * pgt + s.b1 * pgt + s.b0) * p.delta;
      if (m1 < p.m_dry) continue;
      rec(i + 1, m1, E1);
    }
  };
  rec(0, p.m0, p.E0);
  return best;
}

}  // namespace oracle
