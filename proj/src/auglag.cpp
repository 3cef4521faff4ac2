// Copyright 2026 The quadpol Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "quadpol/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <stdexcept>

namespace quadpol {
namespace {

void project(VectorXd& z, const VectorXd& lb, const VectorXd& ub) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z[i] = std::clamp(z[i], lb[i], ub[i]);
  }
}

// ||z - P(z - g)||_inf, the box-constrained stationarity measure.
double projected_gradient_norm(const VectorXd& z, const VectorXd& g,
                               const VectorXd& lb, const VectorXd& ub) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double moved = std::clamp(z[i] - g[i], lb[i], ub[i]);
    worst = std::max(worst, std::abs(z[i] - moved));
  }
  return worst;
}

struct InnerResult {
  double value = 0.0;
  double pg_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool stalled = false;
};

// Projected L-BFGS over a box: quasi-Newton direction on the free variables,
// steepest descent on the binding ones, Armijo backtracking along the
// projection arc.
class BoxLbfgs {
 public:
  BoxLbfgs(const VectorXd& lb, const VectorXd& ub, int memory = 12)
      : lb_(lb), ub_(ub), memory_(memory) {}

  void reset_memory() {
    s_.clear();
    y_.clear();
    rho_.clear();
    gamma_ = 1.0;
  }

  template <typename ValueGrad, typename Value>
  InnerResult minimize(VectorXd& z, double tol, int max_iter,
                       ValueGrad&& value_grad, Value&& value) {
    const Eigen::Index n = z.size();
    VectorXd g(n), g_new(n), d(n), trial(n), step(n);
    double gamma = gamma_;

    double f = value_grad(z, g);
    InnerResult res;
    res.value = f;
    for (int it = 0; it < max_iter; ++it) {
      res.pg_norm = projected_gradient_norm(z, g, lb_, ub_);
      if (res.pg_norm <= tol || !g.allFinite()) {
        res.stalled = !g.allFinite();
        res.iterations = it;
        res.value = f;
        return res;
      }

      two_loop(g, gamma, d);
      // Binding variables: sitting on a bound with the gradient pushing out.
      for (Eigen::Index i = 0; i < n; ++i) {
        if ((z[i] <= lb_[i] && g[i] > 0.0) || (z[i] >= ub_[i] && g[i] < 0.0)) {
          d[i] = -g[i];
        }
      }
      if (!d.allFinite() || d.dot(g) >= 0.0) {
        s_.clear();
        y_.clear();
        rho_.clear();
        d = -g;
      }

      bool accepted = false;
      for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
        double alpha = (it == 0 || attempt == 1)
                           ? std::min(1.0, 1.0 / std::max(1.0, d.lpNorm<Eigen::Infinity>()))
                           : 1.0;
        for (int ls = 0; ls < 50; ++ls) {
          trial = z + alpha * d;
          project(trial, lb_, ub_);
          step = trial - z;
          const double step_norm = step.lpNorm<Eigen::Infinity>();
          if (step_norm < 1e-16 * (1.0 + z.lpNorm<Eigen::Infinity>())) break;
          const double gd = g.dot(step);
          const double fv = value(trial);
          const bool armijo = std::isfinite(fv) &&
                              (gd < 0.0 ? fv <= f + 1e-4 * gd
                                        : fv <= f - 1e-12 * (1.0 + std::abs(f)));
          if (armijo) {
            accepted = true;
            break;
          }
          alpha *= 0.5;
        }
        if (!accepted) {
          // Retry once along steepest descent before giving up.
          if (attempt == 0) {
            s_.clear();
            y_.clear();
            rho_.clear();
            d = -g;
          }
        }
      }
      if (!accepted) {
        res.stalled = true;
        res.iterations = it;
        res.value = f;
        return res;
      }

      const double f_new = value_grad(trial, g_new);
      step = trial - z;
      VectorXd ydiff = g_new - g;
      const double sy = step.dot(ydiff);
      if (sy > 1e-10 * step.norm() * ydiff.norm()) {
        s_.push_back(step);
        y_.push_back(ydiff);
        rho_.push_back(1.0 / sy);
        gamma = sy / ydiff.squaredNorm();
        if (static_cast<int>(s_.size()) > memory_) {
          s_.pop_front();
          y_.pop_front();
          rho_.pop_front();
        }
      }
      z = trial;
      g = g_new;
      f = f_new;
      res.iterations = it + 1;
    }
    res.pg_norm = projected_gradient_norm(z, g, lb_, ub_);
    res.value = f;
    gamma_ = gamma;
    return res;
  }

 private:
  void two_loop(const VectorXd& g, double gamma, VectorXd& d) const {
    d = -g;
    const int k = static_cast<int>(s_.size());
    if (k == 0) return;
    std::vector<double> a(k);
    VectorXd q = g;
    for (int i = k - 1; i >= 0; --i) {
      a[i] = rho_[i] * s_[i].dot(q);
      q -= a[i] * y_[i];
    }
    q *= gamma;
    for (int i = 0; i < k; ++i) {
      const double b = rho_[i] * y_[i].dot(q);
      q += (a[i] - b) * s_[i];
    }
    d = -q;
  }

  const VectorXd& lb_;
  const VectorXd& ub_;
  int memory_;
  double gamma_ = 1.0;
  std::deque<VectorXd> s_, y_;
  std::deque<double> rho_;
};

}  // namespace

// Inner solver for constrained subproblems: projected Levenberg/Gauss-Newton.
// The model Hessian mu * J^T J + objective Hessian captures the penalty
// curvature exactly, which keeps the subproblems tractable as mu grows.
class GaussNewtonInner {
 public:
  GaussNewtonInner(const NlpProblem& nlp, const VectorXd& lambda, const double& mu)
      : nlp_(nlp),
        lambda_(lambda),
        mu_(mu),
        c_(nlp.m),
        c_ls_(nlp.m),
        g_obj_(nlp.n),
        J_(MatrixXd::Zero(nlp.m, nlp.n)),
        H_(nlp.n, nlp.n),
        Hf_(nlp.n, nlp.n) {}

  InnerResult minimize(VectorXd& z, double tol, int max_iter) {
    const int n = nlp_.n;
    VectorXd g(n), d(n), trial(n), step(n);
    std::vector<int> free_idx;
    free_idx.reserve(n);

    double f = al_value_grad(z, g);
    InnerResult res;
    res.value = f;
    for (int it = 0; it < max_iter; ++it) {
      res.pg_norm = projected_gradient_norm(z, g, nlp_.lb, nlp_.ub);
      if (res.pg_norm <= tol || !g.allFinite()) {
        res.stalled = !g.allFinite();
        res.iterations = it;
        res.value = f;
        return res;
      }

      // Model Hessian at z.
      H_.setZero(n, n);
      H_.selfadjointView<Eigen::Lower>().rankUpdate(J_.transpose(), mu_);
      H_.triangularView<Eigen::Upper>() = H_.transpose();
      if (nlp_.objective_hess) {
        nlp_.objective_hess(z, Hf_);
        H_ += Hf_;
      }

      free_idx.clear();
      for (int i = 0; i < n; ++i) {
        const bool at_lower = z[i] <= nlp_.lb[i] && g[i] > 0.0;
        const bool at_upper = z[i] >= nlp_.ub[i] && g[i] < 0.0;
        if (!at_lower && !at_upper) free_idx.push_back(i);
      }
      const int nf = static_cast<int>(free_idx.size());

      bool accepted = false;
      for (int attempt = 0; attempt < 14 && !accepted; ++attempt) {
        d = -g;  // binding components move along steepest descent
        if (nf > 0) {
          MatrixXd Hff(nf, nf);
          VectorXd gf(nf);
          for (int a = 0; a < nf; ++a) {
            gf[a] = g[free_idx[a]];
            for (int b = 0; b < nf; ++b) Hff(a, b) = H_(free_idx[a], free_idx[b]);
          }
          Hff.diagonal().array() += nu_;
          Eigen::LDLT<MatrixXd> ldlt(Hff);
          VectorXd df;
          bool ok = ldlt.info() == Eigen::Success;
          if (ok) {
            df = ldlt.solve(-gf);
            ok = df.allFinite();
          }
          if (!ok) {
            nu_ = std::max(nu_ * 10.0, 1e-8);
            continue;
          }
          for (int a = 0; a < nf; ++a) d[free_idx[a]] = df[a];
        }

        double alpha = 1.0;
        for (int ls = 0; ls < 30; ++ls) {
          trial = z + alpha * d;
          project(trial, nlp_.lb, nlp_.ub);
          step = trial - z;
          if (step.lpNorm<Eigen::Infinity>() <
              1e-16 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
            break;
          }
          const double gd = g.dot(step);
          const double fv = al_value(trial);
          const bool armijo = std::isfinite(fv) &&
                              (gd < 0.0 ? fv <= f + 1e-4 * gd
                                        : fv <= f - 1e-12 * (1.0 + std::abs(f)));
          if (armijo) {
            accepted = true;
            break;
          }
          alpha *= 0.5;
          if (ls >= 3) break;  // poor model: better to re-damp than to crawl
        }
        if (!accepted) nu_ = std::max(nu_ * 10.0, 1e-8);
      }
      if (!accepted) {
        res.stalled = true;
        res.iterations = it;
        res.value = f;
        return res;
      }
      nu_ = std::max(nu_ * 0.25, 1e-10);
      z = trial;
      f = al_value_grad(z, g);
      res.iterations = it + 1;
    }
    res.pg_norm = projected_gradient_norm(z, g, nlp_.lb, nlp_.ub);
    res.value = f;
    return res;
  }

  double al_value_grad(const VectorXd& z, VectorXd& g) {
    const double f = nlp_.objective(z);
    nlp_.objective_grad(z, g_obj_);
    nlp_.constraints_jac(z, c_, J_);
    g.noalias() = g_obj_ + J_.transpose() * (lambda_ + mu_ * c_);
    return f + lambda_.dot(c_) + 0.5 * mu_ * c_.squaredNorm();
  }

  double al_value(const VectorXd& z) {
    const double f = nlp_.objective(z);
    nlp_.constraints(z, c_ls_);
    return f + lambda_.dot(c_ls_) + 0.5 * mu_ * c_ls_.squaredNorm();
  }

 private:
  const NlpProblem& nlp_;
  const VectorXd& lambda_;
  const double& mu_;
  VectorXd c_, c_ls_, g_obj_;
  MatrixXd J_, H_, Hf_;
  double nu_ = 1e-8;
};

NlpSolution solve_nlp(const NlpProblem& nlp, VectorXd z, const SolverTolerances& tol) {
  if (z.size() != nlp.n) throw std::invalid_argument("solve_nlp: guess dimension mismatch");
  project(z, nlp.lb, nlp.ub);

  const int m = nlp.m;
  VectorXd lambda = VectorXd::Zero(m);
  VectorXd c = VectorXd::Zero(m);
  VectorXd c_ls = VectorXd::Zero(m);
  VectorXd g_obj(nlp.n);
  MatrixXd J = MatrixXd::Zero(m, nlp.n);
  double mu = 10.0;

  {
    const double f0 = nlp.objective(z);
    if (m > 0) nlp.constraints(z, c);
    if (!std::isfinite(f0) || !c.allFinite()) {
      throw std::domain_error("solve_nlp: non-finite objective or constraints at initial guess");
    }
  }

  auto value_grad = [&](const VectorXd& zz, VectorXd& g) -> double {
    const double f = nlp.objective(zz);
    nlp.objective_grad(zz, g_obj);
    if (m == 0) {
      g = g_obj;
      return f;
    }
    nlp.constraints_jac(zz, c, J);
    g.noalias() = g_obj + J.transpose() * (lambda + mu * c);
    return f + lambda.dot(c) + 0.5 * mu * c.squaredNorm();
  };
  auto value = [&](const VectorXd& zz) -> double {
    const double f = nlp.objective(zz);
    if (m == 0) return f;
    nlp.constraints(zz, c_ls);
    return f + lambda.dot(c_ls) + 0.5 * mu * c_ls.squaredNorm();
  };

  NlpSolution best;
  best.z = z;
  auto consider_best = [&](const VectorXd& zz, double viol, double fval, double pg) {
    const bool feasible = viol <= tol.defect_tol;
    const bool best_feasible = best.max_constraint_violation <= tol.defect_tol;
    bool take = false;
    if (feasible && (!best_feasible || fval < best.objective_value)) take = true;
    if (!feasible && !best_feasible && viol < best.max_constraint_violation) take = true;
    if (take) {
      best.z = zz;
      best.max_constraint_violation = viol;
      best.objective_value = fval;
      best.stationarity = pg;
    }
  };

  BoxLbfgs lbfgs(nlp.lb, nlp.ub, 20);
  GaussNewtonInner gn(nlp, lambda, mu);
  double omega = 1e-2;
  double eta = 1e-1;
  double viol_prev = std::numeric_limits<double>::infinity();
  int stall_streak = 0;
  bool subproblem_changed = true;

  NlpSolution out;
  if (m == 0) omega = 0.0;  // no multiplier loop: solve to final tolerance at once
  for (int outer = 1; outer <= tol.max_outer; ++outer) {
    const double inner_tol = std::max(omega, 0.3 * tol.stationarity_tol);
    if (subproblem_changed) lbfgs.reset_memory();
    subproblem_changed = false;
    const InnerResult ir =
        m > 0 ? gn.minimize(z, inner_tol, tol.max_inner)
              : lbfgs.minimize(z, inner_tol, tol.max_inner, value_grad, value);
    out.outer_iterations = outer;
    out.inner_iterations += ir.iterations;

    const double fval = nlp.objective(z);
    double viol = 0.0;
    if (m > 0) {
      nlp.constraints(z, c);
      viol = c.lpNorm<Eigen::Infinity>();
    }
    consider_best(z, viol, fval, ir.pg_norm);

    if (std::getenv("QUADPOL_NLP_DEBUG")) {
      std::fprintf(stderr,
                   "outer %2d: inner=%3d pg=%9.3e viol=%9.3e mu=%8.1e f=%12.6f%s\n",
                   outer, ir.iterations, ir.pg_norm, viol, mu, fval,
                   ir.stalled ? " [stall]" : "");
    }

    if (viol <= tol.defect_tol && ir.pg_norm <= tol.stationarity_tol) {
      out.z = z;
      out.converged = true;
      out.max_constraint_violation = viol;
      out.stationarity = ir.pg_norm;
      out.objective_value = fval;
      return out;
    }
    if (m == 0) break;  // box-only problem: one inner solve is all there is

    // Only act on the multipliers or the penalty once the current subproblem
    // is solved to its tolerance (or cannot be pushed further); an inner pass
    // that merely ran out of budget continues unchanged in the next round.
    const bool inner_done = ir.pg_norm <= inner_tol || ir.stalled;
    stall_streak = ir.stalled ? stall_streak + 1 : 0;
    if (stall_streak >= 5) {
      out.message = "stalled";
      break;
    }

    if (viol <= std::max(eta, tol.defect_tol)) {
      lambda += mu * c;
      eta = std::max(0.2 * eta, 0.5 * tol.defect_tol);
      if (inner_done) omega = std::max(0.2 * omega, 0.3 * tol.stationarity_tol);
      subproblem_changed = true;
      viol_prev = viol;
    } else if (inner_done) {
      if (viol <= 0.25 * viol_prev) {
        lambda += mu * c;
      } else {
        mu = std::min(mu * 10.0, 1e8);
      }
      subproblem_changed = true;
      viol_prev = viol;
    }
  }

  out.z = best.z;
  out.converged = false;
  out.max_constraint_violation = best.max_constraint_violation;
  out.stationarity = best.stationarity;
  out.objective_value = best.objective_value;
  if (out.message.empty()) out.message = "MaxIterationsExceeded";
  return out;
}

}  // namespace quadpol
