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

#ifndef QUADPOL_TRANSCRIPTION_HPP_
#define QUADPOL_TRANSCRIPTION_HPP_

#include "quadpol/nlp.hpp"

#include <functional>
#include <vector>

namespace quadpol {

// First-order ODE model with analytic Jacobians.
struct OdeModel {
  int nx = 0;
  int nu = 0;
  std::function<void(const VectorXd& x, const VectorXd& u, VectorXd& dx)> f;
  std::function<void(const VectorXd& x, const VectorXd& u, MatrixXd& dfdx,
                     MatrixXd& dfdu)> jacobians;
};

// Path cost integral(g(u) dt) + time_weight * T, integrated with the same
// Simpson rule as the defects.
struct RunningCost {
  std::function<double(const VectorXd& u)> value;
  std::function<void(const VectorXd& u, VectorXd& grad)> grad;
  std::function<void(const VectorXd& u, MatrixXd& hess)> hess;  // d2g/du2
  double time_weight = 0.0;
};

struct TranscriptionOptions {
  VectorXd x0, xf;
  int k_nodes = 30;
  double t_min = 0.2;
  double t_max = 25.0;
  // Variable scaling applied before the NLP sees the problem. All positive.
  VectorXd state_scale, control_scale;
  double time_scale = 1.0;
  // Physical box bounds on interior node states and on every control sample.
  VectorXd state_lb, state_ub;
  VectorXd control_lb, control_ub;
};

// Hermite-Simpson direct collocation on K-1 segments of width h = T/(K-1).
// Decision variables (scaled): states at the K nodes, controls at the K nodes
// and the K-1 midpoints, and the final time T. Per segment the midpoint state
// is interpolated as (x_k + x_k1)/2 + (h/8)(f_k - f_k1) and the defect is
// x_k1 - x_k - (h/6)(f_k + 4 f_mid + f_k1). Boundary conditions are equality
// rows and additionally pin the first/last node via lb = ub.
class HsTranscription {
 public:
  HsTranscription(OdeModel model, RunningCost cost, TranscriptionOptions opt);

  // Self-contained problem; callbacks share the transcription's workspace and
  // must not be invoked concurrently.
  static NlpProblem make_problem(OdeModel model, RunningCost cost,
                                 TranscriptionOptions opt);

  const NlpLayout& layout() const { return lay_; }
  int num_grid_points() const { return 2 * lay_.k_nodes - 1; }
  const VectorXd& lower_bounds() const { return lb_; }
  const VectorXd& upper_bounds() const { return ub_; }

  // Scaled decision vector from physical data: node_states is K x nx,
  // controls is (2K-1) x nu ordered along the grid (nodes and midpoints
  // interleaved), T the final time.
  VectorXd pack(const MatrixXd& node_states, const MatrixXd& controls, double T) const;

  // Physical trajectory on the full 2K-1 grid; midpoint states come from the
  // Hermite interpolant.
  void dense_grid(const VectorXd& z, VectorXd& times, MatrixXd& states,
                  MatrixXd& controls);

  double objective(const VectorXd& z);
  void objective_grad(const VectorXd& z, VectorXd& g);
  void objective_hess(const VectorXd& z, MatrixXd& H);
  void constraints(const VectorXd& z, VectorXd& c);
  void constraints_jac(const VectorXd& z, VectorXd& c, MatrixXd& J);
  // Gauss-Newton model hess(f) + mu J^T J assembled from the segment blocks.
  void model_hessian(const VectorXd& z, double mu, MatrixXd& H);

  double final_time(const VectorXd& z) const;
  double max_defect(const VectorXd& z);
  double max_bound_violation(const VectorXd& z) const;

 private:
  void gather(const VectorXd& z);   // unscale states/controls into workspace
  void node_dynamics();             // f at every node
  void node_jacobians();
  // Scaled defect rows and their Jacobian for one segment; columns ordered
  // [x_k, x_k1, u_k, u_k1, u_mid, T]. Requires the three calls above.
  void segment_blocks(int k, double h, MatrixXd& SJ, VectorXd& d_scaled);
  void segment_cols(int k, std::vector<int>& cols) const;
  void add_objective_hess(const VectorXd& z, MatrixXd& H);

  OdeModel model_;
  RunningCost cost_;
  TranscriptionOptions opt_;
  NlpLayout lay_;
  VectorXd lb_, ub_;

  // workspace
  MatrixXd xk_, uk_, um_;            // columns per node / midpoint (physical)
  MatrixXd fk_;                      // dynamics at nodes
  std::vector<MatrixXd> Ak_, Bk_;    // node Jacobians
  VectorXd xm_, fm_, dx_;            // per-segment temporaries
  MatrixXd Am_, Bm_;
  MatrixXd Pxk_, Pxk1_, Dblock_;
  VectorXd gwork_;
};

}  // namespace quadpol

#endif  // QUADPOL_TRANSCRIPTION_HPP_
