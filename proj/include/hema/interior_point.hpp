#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hema/block_tridiagonal.hpp"
#include "hema/errors.hpp"

namespace hema::ipm {

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

/// weight * (shift + sum_k coef_k x_k)^2, weight >= 0.
struct SquareTerm {
  double weight = 0.0;
  std::vector<LinearTerm> form;
  double shift = 0.0;

  double affine(const Eigen::VectorXd& x) const {
    double l = shift;
    for (const auto& t : form) l += t.coef * x[t.var];
    return l;
  }
};

/**
 * @brief Concave quadratic inequality  offset + a^T x - sum_t w_t (l_t^T x)^2 >= 0.
 *
 * The variables referenced by one constraint must lie in at most two adjacent blocks; this is
 * what keeps the reduced Newton system block tridiagonal.
 */
struct Constraint {
  double offset = 0.0;
  std::vector<LinearTerm> linear;
  std::vector<SquareTerm> squares;
  int tag = 0;  ///< caller-defined label, reported for the most violated constraint

  double value(const Eigen::VectorXd& x) const {
    double v = offset;
    for (const auto& t : linear) v += t.coef * x[t.var];
    for (const auto& sq : squares) {
      const double l = sq.affine(x);
      v -= sq.weight * l * l;
    }
    return v;
  }
};

/// minimize q^T x subject to constraints, x in blocks of B variables.
template <int B>
struct Program {
  int blocks = 0;
  Eigen::VectorXd objective;
  std::vector<Constraint> constraints;

  int size() const { return B * blocks; }
};

enum class Status { Optimal, Infeasible, MaxIterations };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::MaxIterations: return "MaxIterations";
  }
  return "Unknown";
}

struct Settings {
  double feas_tol = 1e-8;
  double opt_tol = 1e-8;
  int max_iterations = 200;
  double step_fraction = 0.995;
  double regularization = 1e-11;
  int max_backtracks = 40;
  double divergence_threshold = 1e10;  ///< multiplier magnitude treated as an infeasibility signal
};

/// Primal-dual iterate: variables, constraint slacks, multipliers.
struct Iterate {
  Eigen::VectorXd x;
  Eigen::VectorXd s;
  Eigen::VectorXd z;
};

struct Result {
  Status status = Status::MaxIterations;
  Iterate point;
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;  ///< max |c(x) - s|, plus any constraint violation
  double dual_residual = 0.0;    ///< max |q - J^T z|
  double gap = 0.0;              ///< s^T z
  int worst_constraint = -1;     ///< index of the most violated constraint at exit
  double worst_violation = 0.0;  ///< max(0, -c_j(x))
};

namespace detail {

/// Sparse gradient of one constraint at x.
struct Linearization {
  std::vector<int> vars;
  std::vector<double> grad;
};

inline void linearize(const Constraint& c, const Eigen::VectorXd& x, Linearization& out) {
  out.vars.clear();
  out.grad.clear();
  auto slot = [&](int var) -> double& {
    for (std::size_t k = 0; k < out.vars.size(); ++k)
      if (out.vars[k] == var) return out.grad[k];
    out.vars.push_back(var);
    out.grad.push_back(0.0);
    return out.grad.back();
  };
  for (const auto& t : c.linear) slot(t.var) += t.coef;
  for (const auto& sq : c.squares) {
    const double l = sq.affine(x);
    for (const auto& t : sq.form) slot(t.var) -= 2.0 * sq.weight * l * t.coef;
  }
}

inline double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double fraction) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) alpha = std::min(alpha, -fraction * v[i] / dv[i]);
  return alpha;
}

}  // namespace detail

/**
 * @brief Mehrotra predictor-corrector interior-point method for Program<B>.
 *
 * Solves the perturbed KKT system of  min q^T x  s.t. c(x) - s = 0, s >= 0  with the
 * Lagrangian q^T x - z^T c(x). Eliminating s and z leaves
 *   (H + J^T diag(z/s) J) dx = -r_d - J^T S^-1 (Z r_p + r_c),
 * where H = -sum z_j grad^2 c_j is positive semidefinite and block tridiagonal.
 * Iteration order is fixed, so results are bitwise reproducible.
 */
template <int B>
class Solver {
 public:
  explicit Solver(Settings settings = {}) : settings_(settings) {}

  Result solve(const Program<B>& prog, Iterate start) const {
    const int n = prog.size();
    const int p = static_cast<int>(prog.constraints.size());
    require(start.x.size() == n, ErrorKind::DimensionMismatch, "ipm: start point has wrong size");
    require(p > 0, ErrorKind::InvalidArgument, "ipm: no constraints");

    Iterate it = std::move(start);
    Eigen::VectorXd c(p);
    std::vector<detail::Linearization> lin(static_cast<std::size_t>(p));
    evaluate(prog, it.x, c, lin);
    if (it.s.size() != p || it.z.size() != p) {
      it.s = c.cwiseMax(1.0);
      it.z = it.s.cwiseInverse();
    } else {
      for (int j = 0; j < p; ++j) {
        it.s[j] = std::max({it.s[j], c[j], 1e-6});
        it.z[j] = std::max(it.z[j], 1e-6);
      }
    }

    linalg::BlockTridiagonal<B> kkt(prog.blocks), fac(prog.blocks);
    Eigen::VectorXd rd(n), rp(p), rc(p), rhs(n), dx(n), ds(p), dz(p), dx_aff(n), ds_aff(p), dz_aff(p);
    const double qnorm = std::max(1.0, prog.objective.template lpNorm<Eigen::Infinity>());

    Eigen::VectorXd x_trial(n), s_trial(p);

    Result res;
    for (int iter = 0;; ++iter) {
      // residuals
      rd = prog.objective;
      for (int j = 0; j < p; ++j) {
        const auto& l = lin[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < l.vars.size(); ++k) rd[l.vars[k]] -= it.z[j] * l.grad[k];
      }
      rp = c - it.s;
      const double gap = it.s.dot(it.z);
      const double mu = gap / p;
      const double obj = prog.objective.dot(it.x);
      res.iterations = iter;
      res.primal_residual = primal_residual(c, it.s);
      res.dual_residual = rd.template lpNorm<Eigen::Infinity>() / qnorm;
      res.gap = gap;

      if (res.primal_residual <= settings_.feas_tol && res.dual_residual <= settings_.feas_tol &&
          gap <= settings_.opt_tol * std::max(1.0, std::abs(obj))) {
        res.status = Status::Optimal;
        break;
      }
      if (it.z.maxCoeff() > settings_.divergence_threshold && res.primal_residual > settings_.feas_tol) {
        res.status = Status::Infeasible;
        break;
      }
      if (iter >= settings_.max_iterations) {
        res.status = res.primal_residual > std::sqrt(settings_.feas_tol) ? Status::Infeasible
                                                                           : Status::MaxIterations;
        break;
      }

      assemble(prog, it, lin, kkt);
      if (!factor(kkt, fac)) {
        res.status = res.primal_residual > std::sqrt(settings_.feas_tol) ? Status::Infeasible
                                                                           : Status::MaxIterations;
        break;
      }

      // predictor
      rc = it.s.cwiseProduct(it.z);
      direction(kkt, fac, lin, it, rd, rp, rc, rhs, dx_aff, ds_aff, dz_aff);
      const double ap_aff = detail::max_step(it.s, ds_aff, 1.0);
      const double ad_aff = detail::max_step(it.z, dz_aff, 1.0);
      const double mu_aff = (it.s + ap_aff * ds_aff).dot(it.z + ad_aff * dz_aff) / p;
      const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

      // corrector
      rc = it.s.cwiseProduct(it.z) + ds_aff.cwiseProduct(dz_aff);
      // keep complementarity from collapsing before the residuals do
      const double mu_target = std::max(sigma * mu, 1e-4 * std::max(res.primal_residual, res.dual_residual));
      rc.array() -= mu_target;
      direction(kkt, fac, lin, it, rd, rp, rc, rhs, dx, ds, dz);

      double ap = detail::max_step(it.s, ds, settings_.step_fraction);
      const double ad = detail::max_step(it.z, dz, settings_.step_fraction);
      // halve the primal step while the curved constraints drift far from their linearization
      const double drift_cap = std::max(10.0 * res.primal_residual, 100.0 * settings_.feas_tol);
      for (int b = 0; b < settings_.max_backtracks; ++b) {
        x_trial = it.x + ap * dx;
        s_trial = it.s + ap * ds;
        for (int j = 0; j < p; ++j) c[j] = prog.constraints[static_cast<std::size_t>(j)].value(x_trial);
        if (primal_residual(c, s_trial) <= drift_cap) break;
        ap *= 0.5;
      }
      it.x += ap * dx;
      it.s += ap * ds;
      it.z += ad * dz;
      evaluate(prog, it.x, c, lin);
    }

    res.worst_violation = 0.0;
    res.worst_constraint = -1;
    for (int j = 0; j < p; ++j) {
      if (-c[j] > res.worst_violation) {
        res.worst_violation = -c[j];
        res.worst_constraint = j;
      }
    }
    res.objective = prog.objective.dot(it.x);
    res.point = std::move(it);
    return res;
  }

 private:
  /// Largest deviation of the slacks from the constraint values, plus any constraint violation.
  static double primal_residual(const Eigen::VectorXd& c, const Eigen::VectorXd& s) {
    return std::max((c - s).template lpNorm<Eigen::Infinity>(), std::max(0.0, -c.minCoeff()));
  }

  static void evaluate(const Program<B>& prog, const Eigen::VectorXd& x, Eigen::VectorXd& c,
                       std::vector<detail::Linearization>& lin) {
    for (std::size_t j = 0; j < prog.constraints.size(); ++j) {
      c[static_cast<Eigen::Index>(j)] = prog.constraints[j].value(x);
      detail::linearize(prog.constraints[j], x, lin[j]);
    }
  }

  static void assemble(const Program<B>& prog, const Iterate& it,
                       const std::vector<detail::Linearization>& lin, linalg::BlockTridiagonal<B>& kkt) {
    kkt.set_zero();
    for (std::size_t j = 0; j < prog.constraints.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double zj = it.z[jj];
      // curvature: z_j * 2 w l l^T
      for (const auto& sq : prog.constraints[j].squares) {
        const double w = 2.0 * zj * sq.weight;
        for (std::size_t a = 0; a < sq.form.size(); ++a)
          for (std::size_t b = 0; b <= a; ++b)
            kkt.add(sq.form[a].var, sq.form[b].var, w * sq.form[a].coef * sq.form[b].coef);
      }
      // barrier: (z_j / s_j) g g^T
      const double d = zj / it.s[jj];
      const auto& l = lin[j];
      for (std::size_t a = 0; a < l.vars.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b) kkt.add(l.vars[a], l.vars[b], d * l.grad[a] * l.grad[b]);
    }
  }

  /// Factors kkt into fac, adding a diagonal shift (relative to each pivot after the first
  /// failure) until every pivot block is positive definite.
  bool factor(const linalg::BlockTridiagonal<B>& kkt, linalg::BlockTridiagonal<B>& fac) const {
    double rel = 1e-15;
    for (int attempt = 0; attempt < 10; ++attempt) {
      fac = kkt;
      fac.add_diagonal(settings_.regularization);
      if (attempt > 0) {
        fac.add_relative_diagonal(rel);
        rel *= 100.0;
      }
      if (fac.factor()) return true;
    }
    return false;
  }

  static void direction(const linalg::BlockTridiagonal<B>& kkt, const linalg::BlockTridiagonal<B>& fac,
                        const std::vector<detail::Linearization>& lin,
                        const Iterate& it, const Eigen::VectorXd& rd, const Eigen::VectorXd& rp,
                        const Eigen::VectorXd& rc, Eigen::VectorXd& rhs, Eigen::VectorXd& dx,
                        Eigen::VectorXd& ds, Eigen::VectorXd& dz) {
    rhs = -rd;
    for (std::size_t j = 0; j < lin.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double t = (it.z[jj] * rp[jj] + rc[jj]) / it.s[jj];
      const auto& l = lin[j];
      for (std::size_t k = 0; k < l.vars.size(); ++k) rhs[l.vars[k]] -= l.grad[k] * t;
    }
    dx = rhs;
    fac.solve_in_place(dx);
    // iterative refinement against the unshifted matrix
    Eigen::VectorXd r(dx.size());
    const double target = 1e-14 * std::max(1.0, rhs.template lpNorm<Eigen::Infinity>());
    for (int pass = 0; pass < 4; ++pass) {
      kkt.multiply(dx, r);
      r = rhs - r;
      if (r.template lpNorm<Eigen::Infinity>() <= target) break;
      fac.solve_in_place(r);
      dx += r;
    }
    for (std::size_t j = 0; j < lin.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const auto& l = lin[j];
      double jdx = 0.0;
      for (std::size_t k = 0; k < l.vars.size(); ++k) jdx += l.grad[k] * dx[l.vars[k]];
      ds[jj] = jdx + rp[jj];
      dz[jj] = -(rc[jj] + it.z[jj] * ds[jj]) / it.s[jj];
    }
  }

  Settings settings_;
};

}  // namespace hema::ipm
