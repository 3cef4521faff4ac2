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

#ifndef QUADPOL_TRAJOPT_HPP_
#define QUADPOL_TRAJOPT_HPP_

#include "quadpol/dynamics.hpp"
#include "quadpol/nlp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace quadpol {

enum class ObjectiveKind {
  QuadraticControl,  // integral of ||u||^2
  RegularisedTime,   // T + alpha * integral of omega^2
};

struct Objective {
  ObjectiveKind kind = ObjectiveKind::QuadraticControl;
  double alpha = 0.1;  // only meaningful for RegularisedTime
};

std::string objective_tag(const Objective& o);          // "qoc" / "toc"
Objective objective_from_tag(const std::string& tag);

// One maneuver: steer from x0 to xf minimizing the objective over u(t) and T.
struct OcpSpec {
  State x0, xf;
  Objective objective;
  ModelParams params;
  int k_nodes = 30;
  double t_min = 0.2;
  double t_max = 25.0;
};

// Throws std::invalid_argument on hard violations (k_nodes < 3, bad time
// bounds, non-finite endpoints, negative alpha); returns human-readable
// warnings for soft ones (endpoints outside the sampling box).
std::vector<std::string> validate_ocp(const OcpSpec& spec);

struct SolverStats {
  int outer_iterations = 0;
  int inner_iterations = 0;
  double max_defect = 0.0;            // scaled state units
  double max_bound_violation = 0.0;   // scaled units
  double stationarity = 0.0;
  int retries = 0;
};

// Discretized solution on the uniform 2K-1 grid (nodes plus midpoints).
struct Trajectory {
  int id = -1;
  Objective objective;
  VectorXd times;     // J entries, times[0] = 0, times[J-1] = T
  MatrixXd states;    // J x 5
  MatrixXd controls;  // J x 2
  double objective_value = 0.0;
  bool converged = false;
  SolverStats stats;

  int points() const { return static_cast<int>(times.size()); }
  double final_time() const { return times.size() ? times[times.size() - 1] : 0.0; }
  State initial_state() const { return State::from_vec(states.row(0).transpose()); }
  State final_state() const {
    return State::from_vec(states.row(states.rows() - 1).transpose());
  }
};

struct SolveOptions {
  SolverTolerances tols;
  int retry_max = 3;
  double guess_noise = 0.05;  // scaled units, uniform, applied on retries
};

// Hermite-Simpson transcription of the maneuver problem with the solver
// scaling baked in (states by the sampling-box half-widths, controls by their
// limits, T by t_max). The pitch path constraint enters as node-wise bounds.
NlpProblem transcribe(const OcpSpec& spec);

// Full solve. QuadraticControl runs a single solve from the default guess;
// RegularisedTime first solves the pure-time problem (alpha = 0) and re-solves
// from that point with the given alpha. Non-convergence triggers up to
// retry_max restarts from a perturbed guess; the final flag reports the
// outcome, never an exception.
Trajectory solve_ocp(const OcpSpec& spec, std::uint64_t seed,
                     const SolveOptions& options = {});

// Simpson quadrature of the objective integrand over the trajectory's stored
// grid. Throws std::invalid_argument for grids that are too short or not
// uniform. With pure_time the final time is returned instead of the
// regularised value.
double evaluate_objective(const Trajectory& traj, const Objective& objective,
                          bool pure_time = false);

// Same integrand on arbitrary sample grids (e.g. closed-loop rollouts whose
// last step is shorter). Exact for integrands that are piecewise quadratic in
// time; reduces to composite Simpson on uniform odd-length grids.
double evaluate_objective_samples(const VectorXd& times, const MatrixXd& controls,
                                  const Objective& objective, bool pure_time = false);

// Integral of sampled values by piecewise-quadratic interpolation.
double integrate_samples(const VectorXd& times, const VectorXd& values);

// Fraction of thrust samples within tol_frac * ft_max of either thrust bound.
double bang_fraction(const Trajectory& traj, const ModelParams& params,
                     double tol_frac = 0.01);

}  // namespace quadpol

#endif  // QUADPOL_TRAJOPT_HPP_
