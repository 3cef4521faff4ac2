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

#ifndef QUADPOL_NLP_HPP_
#define QUADPOL_NLP_HPP_

#include "quadpol/common.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <string>

namespace quadpol {

class HsTranscription;

struct SolverTolerances {
  double defect_tol = 1e-6;        // max equality residual (scaled)
  double stationarity_tol = 1e-6;  // projected gradient of the augmented Lagrangian
  double bound_tol = 1e-9;         // slack allowed on box bounds in reported solutions
  int max_outer = 50;              // multiplier/penalty updates
  int max_inner = 200;             // quasi-Newton iterations per outer pass
};

// Decision-vector layout of a transcribed trajectory problem:
//   [states at K nodes | controls at K nodes | controls at K-1 midpoints | T].
struct NlpLayout {
  int nx = 0;
  int nu = 0;
  int k_nodes = 0;

  int num_vars() const { return nx * k_nodes + nu * (2 * k_nodes - 1) + 1; }
  int num_constraints() const { return nx * (k_nodes - 1) + 2 * nx; }
  int state_offset(int k) const { return k * nx; }
  int node_control_offset(int k) const { return nx * k_nodes + k * nu; }
  int mid_control_offset(int k) const { return nx * k_nodes + nu * k_nodes + k * nu; }
  int time_index() const { return num_vars() - 1; }
};

// Smooth equality-constrained problem with box bounds:
//   min f(z)  s.t.  c(z) = 0,  lb <= z <= ub.
// `constraints_jac` writes c and overwrites a fixed sparsity pattern in J; any
// entry it never touches must already be zero and stays zero across calls.
// The callbacks may share workspace, so a problem instance must not be used
// from more than one thread at a time.
struct NlpProblem {
  int n = 0;
  int m = 0;
  VectorXd lb, ub;
  std::function<double(const VectorXd&)> objective;
  std::function<void(const VectorXd&, VectorXd&)> objective_grad;
  std::function<void(const VectorXd&, VectorXd&)> constraints;
  std::function<void(const VectorXd&, VectorXd&, MatrixXd&)> constraints_jac;
  // Optional exact objective Hessian (dense, overwritten). When present the
  // solver's inner iteration uses a Gauss-Newton model of the penalty term
  // plus this Hessian; when absent it falls back to Levenberg damping alone.
  std::function<void(const VectorXd&, MatrixXd&)> objective_hess;
  // Optional fast path for the full Gauss-Newton model H = hess(f) + mu J^T J,
  // assembled from problem structure instead of a dense rank update.
  std::function<void(const VectorXd&, double mu, MatrixXd&)> model_hessian;

  NlpLayout layout;                              // set when built by transcribe()
  std::shared_ptr<HsTranscription> transcription;  // keeps callbacks alive
};

struct NlpSolution {
  VectorXd z;
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double max_constraint_violation = std::numeric_limits<double>::infinity();
  double stationarity = std::numeric_limits<double>::infinity();
  double objective_value = std::numeric_limits<double>::quiet_NaN();
  std::string message;
};

// Augmented-Lagrangian solver: the equality constraints enter the penalty
// function, the box bounds are handled by a projected L-BFGS inner solver.
// The guess is projected onto the box first. On iteration exhaustion the best
// iterate found is returned with converged = false. Throws std::domain_error
// if the objective or constraints are non-finite at the starting point.
NlpSolution solve_nlp(const NlpProblem& nlp, VectorXd guess,
                      const SolverTolerances& tol = {});

}  // namespace quadpol

#endif  // QUADPOL_NLP_HPP_
