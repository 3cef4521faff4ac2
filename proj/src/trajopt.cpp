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

#include "quadpol/trajopt.hpp"

#include "quadpol/transcription.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace quadpol {
namespace {

// Sampling-box half-widths, used purely as solver scaling.
Vec5 state_scales() {
  Vec5 s;
  s << 10.0, 5.0, 10.0, 5.0, kPi / 4.0;
  return s;
}

OdeModel quad_model(const ModelParams& p) {
  OdeModel m;
  m.nx = 5;
  m.nu = 2;
  m.f = [p](const VectorXd& x, const VectorXd& u, VectorXd& dx) {
    dx.resize(5);
    Vec5 xs = x;
    Vec2 us = u;
    Vec5 d;
    dynamics(xs, us, p, d);
    dx = d;
  };
  m.jacobians = [p](const VectorXd& x, const VectorXd& u, MatrixXd& A, MatrixXd& B) {
    Mat5 Af;
    Mat52 Bf;
    Vec5 xs = x;
    Vec2 us = u;
    dynamics_jacobians(xs, us, p, Af, Bf);
    A = Af;
    B = Bf;
  };
  return m;
}

RunningCost objective_cost(const Objective& o) {
  RunningCost c;
  if (o.kind == ObjectiveKind::QuadraticControl) {
    c.value = [](const VectorXd& u) { return u[0] * u[0] + u[1] * u[1]; };
    c.grad = [](const VectorXd& u, VectorXd& g) {
      g.resize(2);
      g[0] = 2.0 * u[0];
      g[1] = 2.0 * u[1];
    };
    c.hess = [](const VectorXd&, MatrixXd& h) {
      h = 2.0 * MatrixXd::Identity(2, 2);
    };
    c.time_weight = 0.0;
  } else {
    const double alpha = o.alpha;
    c.value = [alpha](const VectorXd& u) { return alpha * u[1] * u[1]; };
    c.grad = [alpha](const VectorXd& u, VectorXd& g) {
      g.resize(2);
      g[0] = 0.0;
      g[1] = 2.0 * alpha * u[1];
    };
    c.hess = [alpha](const VectorXd&, MatrixXd& h) {
      h.setZero(2, 2);
      h(1, 1) = 2.0 * alpha;
    };
    c.time_weight = 1.0;
  }
  return c;
}

NlpProblem transcribe_with_objective(const OcpSpec& spec, const Objective& o) {
  const Vec5 sx = state_scales();
  TranscriptionOptions opt;
  opt.x0 = spec.x0.vec();
  opt.xf = spec.xf.vec();
  opt.k_nodes = spec.k_nodes;
  opt.t_min = spec.t_min;
  opt.t_max = spec.t_max;
  opt.state_scale = sx;
  opt.control_scale = Vec2(spec.params.ft_max, spec.params.omega_max);
  opt.time_scale = spec.t_max;
  // Only the pitch carries a path constraint; the other states get loose
  // bounds that keep solver iterates from running away.
  opt.state_lb = -5.0 * sx;
  opt.state_ub = 5.0 * sx;
  opt.state_lb[4] = -spec.params.theta_max;
  opt.state_ub[4] = spec.params.theta_max;
  opt.control_lb = Vec2(0.0, -spec.params.omega_max);
  opt.control_ub = Vec2(spec.params.ft_max, spec.params.omega_max);
  return HsTranscription::make_problem(quad_model(spec.params), objective_cost(o), opt);
}

VectorXd default_guess(const OcpSpec& spec, const HsTranscription& t) {
  const int K = spec.k_nodes;
  const Vec5 a = spec.x0.vec();
  const Vec5 b = spec.xf.vec();
  MatrixXd node_states(K, 5);
  for (int k = 0; k < K; ++k) {
    const double w = static_cast<double>(k) / (K - 1);
    node_states.row(k) = ((1.0 - w) * a + w * b).transpose();
  }
  MatrixXd controls(2 * K - 1, 2);
  controls.col(0).setConstant(spec.params.m * spec.params.g);
  controls.col(1).setZero();
  const double dist = std::hypot(spec.xf.x - spec.x0.x, spec.xf.z - spec.x0.z);
  const double T0 = std::clamp(std::max(1.0, dist / 2.0), spec.t_min, spec.t_max);
  return t.pack(node_states, controls, T0);
}

Trajectory trajectory_from_solution(const OcpSpec& spec, HsTranscription& t,
                                    const NlpSolution& sol, int retries) {
  Trajectory traj;
  traj.objective = spec.objective;
  t.dense_grid(sol.z, traj.times, traj.states, traj.controls);
  traj.converged = sol.converged;
  traj.objective_value = sol.objective_value;
  traj.stats.outer_iterations = sol.outer_iterations;
  traj.stats.inner_iterations = sol.inner_iterations;
  traj.stats.max_defect = t.max_defect(sol.z);
  traj.stats.max_bound_violation = t.max_bound_violation(sol.z);
  traj.stats.stationarity = sol.stationarity;
  traj.stats.retries = retries;
  return traj;
}

}  // namespace

std::string objective_tag(const Objective& o) {
  return o.kind == ObjectiveKind::QuadraticControl ? "qoc" : "toc";
}

Objective objective_from_tag(const std::string& tag) {
  if (tag == "qoc") return {ObjectiveKind::QuadraticControl, 0.0};
  if (tag == "toc") return {ObjectiveKind::RegularisedTime, 0.1};
  throw std::invalid_argument("unknown objective tag: " + tag);
}

std::vector<std::string> validate_ocp(const OcpSpec& spec) {
  if (spec.k_nodes < 3) throw std::invalid_argument("ocp: k_nodes must be >= 3");
  if (!(spec.t_min > 0.0) || !(spec.t_min < spec.t_max)) {
    throw std::invalid_argument("ocp: need 0 < t_min < t_max");
  }
  if (!spec.x0.finite() || !spec.xf.finite()) {
    throw std::invalid_argument("ocp: non-finite boundary state");
  }
  if (spec.objective.alpha < 0.0) throw std::invalid_argument("ocp: alpha must be >= 0");
  if (!spec.params.valid()) throw std::invalid_argument("ocp: invalid model parameters");

  std::vector<std::string> warnings;
  const Vec5 lo = (Vec5() << -10, -5, -10, -5, -kPi / 4).finished();
  const Vec5 hi = -lo;
  auto check = [&](const State& s, const char* name) {
    const Vec5 v = s.vec();
    for (int i = 0; i < 5; ++i) {
      if (v[i] < lo[i] || v[i] > hi[i]) {
        warnings.push_back(std::string(name) + " lies outside the sampling box");
        return;
      }
    }
  };
  check(spec.x0, "x0");
  check(spec.xf, "xf");
  return warnings;
}

NlpProblem transcribe(const OcpSpec& spec) {
  validate_ocp(spec);
  return transcribe_with_objective(spec, spec.objective);
}

Trajectory solve_ocp(const OcpSpec& spec, std::uint64_t seed, const SolveOptions& options) {
  validate_ocp(spec);
  Rng rng(derive_seed(seed, 0x7261 /* arbitrary stream tag */));

  NlpProblem target = transcribe_with_objective(spec, spec.objective);
  const bool continuation = spec.objective.kind == ObjectiveKind::RegularisedTime;
  NlpProblem stage1;
  SolverTolerances stage1_tols = options.tols;
  if (continuation) {
    Objective pure_time{ObjectiveKind::RegularisedTime, 0.0};
    stage1 = transcribe_with_objective(spec, pure_time);
    // The unregularised stage only warm-starts the regularised one; a rough
    // stationary point is enough.
    stage1_tols.defect_tol = std::max(options.tols.defect_tol, 1e-5);
    stage1_tols.stationarity_tol = std::max(options.tols.stationarity_tol, 1e-4);
    stage1_tols.max_outer = std::min(options.tols.max_outer, 20);
  }

  const VectorXd base = default_guess(spec, *target.transcription);
  NlpSolution sol;
  int retries = 0;
  for (int attempt = 0; attempt <= options.retry_max; ++attempt) {
    VectorXd guess = base;
    if (attempt > 0) {
      for (Eigen::Index i = 0; i < guess.size(); ++i) {
        guess[i] += rng.uniform(-options.guess_noise, options.guess_noise);
      }
    }
    try {
      if (continuation) {
        const NlpSolution warm = solve_nlp(stage1, guess, stage1_tols);
        sol = solve_nlp(target, warm.z, options.tols);
      } else {
        sol = solve_nlp(target, guess, options.tols);
      }
    } catch (const std::domain_error&) {
      sol = NlpSolution{};
      sol.z = guess;
      sol.message = "non-finite evaluation";
    }
    retries = attempt;
    if (sol.converged) break;
  }
  if (sol.z.size() == 0) sol.z = base;
  if (!std::isfinite(sol.objective_value)) sol.objective_value = target.objective(sol.z);
  return trajectory_from_solution(spec, *target.transcription, sol, retries);
}

double integrate_samples(const VectorXd& times, const VectorXd& values) {
  const Eigen::Index n = times.size();
  if (n != values.size()) throw std::invalid_argument("integrate_samples: size mismatch");
  if (n < 2) throw std::invalid_argument("integrate_samples: need at least 2 samples");
  if (n == 2) return 0.5 * (values[0] + values[1]) * (times[1] - times[0]);

  // Integral of the quadratic through three samples, over [ta, tb].
  auto quad_piece = [&](Eigen::Index i0, double ta, double tb) {
    const double t0 = times[i0], t1 = times[i0 + 1], t2 = times[i0 + 2];
    const double f0 = values[i0], f1 = values[i0 + 1], f2 = values[i0 + 2];
    const double c1 = (f1 - f0) / (t1 - t0);
    const double c2 = ((f2 - f1) / (t2 - t1) - c1) / (t2 - t0);
    const double ua = ta - t0, ub = tb - t0;
    const double d = t1 - t0;
    const double lin = (ub * ub - ua * ua) / 2.0;
    const double cub = (ub * ub * ub - ua * ua * ua) / 3.0 - d * lin;
    return f0 * (tb - ta) + c1 * lin + c2 * cub;
  };

  double acc = 0.0;
  Eigen::Index i = 0;
  for (; i + 2 < n; i += 2) {
    acc += quad_piece(i, times[i], times[i + 2]);
  }
  if (i + 1 < n) {
    // Even sample count: one interval left, integrate the quadratic through
    // the last three points over that interval only.
    acc += quad_piece(n - 3, times[n - 2], times[n - 1]);
  }
  return acc;
}

namespace {

double objective_from_samples(const VectorXd& times, const MatrixXd& controls,
                              const Objective& objective, bool pure_time) {
  const Eigen::Index n = times.size();
  if (n < 3) throw std::invalid_argument("evaluate_objective: need at least 3 samples");
  const double T = times[n - 1];
  if (pure_time) return T;
  VectorXd integrand(n);
  if (objective.kind == ObjectiveKind::QuadraticControl) {
    integrand = controls.col(0).array().square() + controls.col(1).array().square();
  } else {
    integrand = objective.alpha * controls.col(1).array().square();
  }
  const double integral = integrate_samples(times, integrand);
  return objective.kind == ObjectiveKind::QuadraticControl ? integral : T + integral;
}

}  // namespace

double evaluate_objective(const Trajectory& traj, const Objective& objective,
                          bool pure_time) {
  const Eigen::Index n = traj.times.size();
  if (n < 3) throw std::invalid_argument("evaluate_objective: grid too short");
  const double dt = traj.times[1] - traj.times[0];
  for (Eigen::Index j = 1; j < n; ++j) {
    const double step = traj.times[j] - traj.times[j - 1];
    if (std::abs(step - dt) > 1e-9 * std::max(1.0, traj.final_time())) {
      throw std::invalid_argument("evaluate_objective: grid not uniform");
    }
  }
  return objective_from_samples(traj.times, traj.controls, objective, pure_time);
}

double evaluate_objective_samples(const VectorXd& times, const MatrixXd& controls,
                                  const Objective& objective, bool pure_time) {
  return objective_from_samples(times, controls, objective, pure_time);
}

double bang_fraction(const Trajectory& traj, const ModelParams& params, double tol_frac) {
  const double tol = tol_frac * params.ft_max;
  Eigen::Index at_bang = 0;
  for (Eigen::Index j = 0; j < traj.controls.rows(); ++j) {
    const double ft = traj.controls(j, 0);
    if (ft <= tol || ft >= params.ft_max - tol) ++at_bang;
  }
  return static_cast<double>(at_bang) / static_cast<double>(traj.controls.rows());
}

}  // namespace quadpol
