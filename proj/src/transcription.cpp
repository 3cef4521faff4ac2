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

#include "quadpol/transcription.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace quadpol {

HsTranscription::HsTranscription(OdeModel model, RunningCost cost,
                                 TranscriptionOptions opt)
    : model_(std::move(model)), cost_(std::move(cost)), opt_(std::move(opt)) {
  if (opt_.k_nodes < 3) throw std::invalid_argument("transcription: k_nodes must be >= 3");
  if (!(opt_.t_min > 0.0) || opt_.t_max < opt_.t_min) {
    throw std::invalid_argument("transcription: need 0 < t_min <= t_max");
  }
  const int nx = model_.nx;
  const int nu = model_.nu;
  if (opt_.x0.size() != nx || opt_.xf.size() != nx) {
    throw std::invalid_argument("transcription: boundary state dimension mismatch");
  }
  if (opt_.state_scale.size() == 0) opt_.state_scale = VectorXd::Ones(nx);
  if (opt_.control_scale.size() == 0) opt_.control_scale = VectorXd::Ones(nu);
  if (opt_.state_lb.size() == 0) opt_.state_lb = VectorXd::Constant(nx, -1e20);
  if (opt_.state_ub.size() == 0) opt_.state_ub = VectorXd::Constant(nx, 1e20);
  if (opt_.control_lb.size() == 0) opt_.control_lb = VectorXd::Constant(nu, -1e20);
  if (opt_.control_ub.size() == 0) opt_.control_ub = VectorXd::Constant(nu, 1e20);
  if ((opt_.state_scale.array() <= 0).any() || (opt_.control_scale.array() <= 0).any() ||
      opt_.time_scale <= 0) {
    throw std::invalid_argument("transcription: scales must be positive");
  }

  lay_.nx = nx;
  lay_.nu = nu;
  lay_.k_nodes = opt_.k_nodes;
  const int K = lay_.k_nodes;
  const int n = lay_.num_vars();

  lb_.resize(n);
  ub_.resize(n);
  const VectorXd slb = opt_.state_lb.cwiseQuotient(opt_.state_scale);
  const VectorXd sub = opt_.state_ub.cwiseQuotient(opt_.state_scale);
  const VectorXd clb = opt_.control_lb.cwiseQuotient(opt_.control_scale);
  const VectorXd cub = opt_.control_ub.cwiseQuotient(opt_.control_scale);
  for (int k = 0; k < K; ++k) {
    lb_.segment(lay_.state_offset(k), nx) = slb;
    ub_.segment(lay_.state_offset(k), nx) = sub;
    lb_.segment(lay_.node_control_offset(k), nu) = clb;
    ub_.segment(lay_.node_control_offset(k), nu) = cub;
  }
  for (int k = 0; k < K - 1; ++k) {
    lb_.segment(lay_.mid_control_offset(k), nu) = clb;
    ub_.segment(lay_.mid_control_offset(k), nu) = cub;
  }
  // Pin the boundary nodes exactly.
  lb_.segment(lay_.state_offset(0), nx) = opt_.x0.cwiseQuotient(opt_.state_scale);
  ub_.segment(lay_.state_offset(0), nx) = lb_.segment(lay_.state_offset(0), nx);
  lb_.segment(lay_.state_offset(K - 1), nx) = opt_.xf.cwiseQuotient(opt_.state_scale);
  ub_.segment(lay_.state_offset(K - 1), nx) = lb_.segment(lay_.state_offset(K - 1), nx);
  lb_[lay_.time_index()] = opt_.t_min / opt_.time_scale;
  ub_[lay_.time_index()] = opt_.t_max / opt_.time_scale;

  xk_.resize(nx, K);
  uk_.resize(nu, K);
  um_.resize(nu, K - 1);
  fk_.resize(nx, K);
  Ak_.assign(K, MatrixXd(nx, nx));
  Bk_.assign(K, MatrixXd(nx, nu));
  xm_.resize(nx);
  fm_.resize(nx);
  dx_.resize(nx);
  Am_.resize(nx, nx);
  Bm_.resize(nx, nu);
  Pxk_.resize(nx, nx);
  Pxk1_.resize(nx, nx);
  Dblock_.resize(nx, nx);
  gwork_.resize(nu);
}

NlpProblem HsTranscription::make_problem(OdeModel model, RunningCost cost,
                                         TranscriptionOptions opt) {
  auto t = std::make_shared<HsTranscription>(std::move(model), std::move(cost),
                                             std::move(opt));
  NlpProblem p;
  p.n = t->lay_.num_vars();
  p.m = t->lay_.num_constraints();
  p.lb = t->lb_;
  p.ub = t->ub_;
  p.objective = [t](const VectorXd& z) { return t->objective(z); };
  p.objective_grad = [t](const VectorXd& z, VectorXd& g) { t->objective_grad(z, g); };
  p.constraints = [t](const VectorXd& z, VectorXd& c) { t->constraints(z, c); };
  p.constraints_jac = [t](const VectorXd& z, VectorXd& c, MatrixXd& J) {
    t->constraints_jac(z, c, J);
  };
  if (t->cost_.hess) {
    p.objective_hess = [t](const VectorXd& z, MatrixXd& H) { t->objective_hess(z, H); };
  }
  p.layout = t->lay_;
  p.transcription = t;
  return p;
}

double HsTranscription::final_time(const VectorXd& z) const {
  return opt_.time_scale * z[lay_.time_index()];
}

void HsTranscription::gather(const VectorXd& z) {
  const int K = lay_.k_nodes;
  for (int k = 0; k < K; ++k) {
    xk_.col(k) = opt_.state_scale.cwiseProduct(z.segment(lay_.state_offset(k), lay_.nx));
    uk_.col(k) =
        opt_.control_scale.cwiseProduct(z.segment(lay_.node_control_offset(k), lay_.nu));
  }
  for (int k = 0; k < K - 1; ++k) {
    um_.col(k) =
        opt_.control_scale.cwiseProduct(z.segment(lay_.mid_control_offset(k), lay_.nu));
  }
}

void HsTranscription::node_dynamics() {
  const int K = lay_.k_nodes;
  for (int k = 0; k < K; ++k) {
    VectorXd x = xk_.col(k);
    VectorXd u = uk_.col(k);
    model_.f(x, u, dx_);
    fk_.col(k) = dx_;
  }
}

void HsTranscription::node_jacobians() {
  const int K = lay_.k_nodes;
  for (int k = 0; k < K; ++k) {
    VectorXd x = xk_.col(k);
    VectorXd u = uk_.col(k);
    model_.jacobians(x, u, Ak_[k], Bk_[k]);
  }
}

VectorXd HsTranscription::pack(const MatrixXd& node_states, const MatrixXd& controls,
                               double T) const {
  const int K = lay_.k_nodes;
  const int nx = lay_.nx;
  const int nu = lay_.nu;
  if (node_states.rows() != K || node_states.cols() != nx ||
      controls.rows() != 2 * K - 1 || controls.cols() != nu) {
    throw std::invalid_argument("pack: shape mismatch");
  }
  VectorXd z(lay_.num_vars());
  for (int k = 0; k < K; ++k) {
    z.segment(lay_.state_offset(k), nx) =
        node_states.row(k).transpose().cwiseQuotient(opt_.state_scale);
    z.segment(lay_.node_control_offset(k), nu) =
        controls.row(2 * k).transpose().cwiseQuotient(opt_.control_scale);
  }
  for (int k = 0; k < K - 1; ++k) {
    z.segment(lay_.mid_control_offset(k), nu) =
        controls.row(2 * k + 1).transpose().cwiseQuotient(opt_.control_scale);
  }
  z[lay_.time_index()] = T / opt_.time_scale;
  return z;
}

void HsTranscription::dense_grid(const VectorXd& z, VectorXd& times, MatrixXd& states,
                                 MatrixXd& controls) {
  gather(z);
  node_dynamics();
  const int K = lay_.k_nodes;
  const int J = 2 * K - 1;
  const double T = final_time(z);
  const double h = T / (K - 1);
  times.resize(J);
  states.resize(J, lay_.nx);
  controls.resize(J, lay_.nu);
  for (int j = 0; j < J; ++j) {
    times[j] = T * (static_cast<double>(j) / (J - 1));
  }
  for (int k = 0; k < K; ++k) {
    states.row(2 * k) = xk_.col(k).transpose();
    controls.row(2 * k) = uk_.col(k).transpose();
  }
  for (int k = 0; k < K - 1; ++k) {
    xm_ = 0.5 * (xk_.col(k) + xk_.col(k + 1)) + (h / 8.0) * (fk_.col(k) - fk_.col(k + 1));
    states.row(2 * k + 1) = xm_.transpose();
    controls.row(2 * k + 1) = um_.col(k).transpose();
  }
}

double HsTranscription::objective(const VectorXd& z) {
  gather(z);
  const int K = lay_.k_nodes;
  const double T = final_time(z);
  const double h = T / (K - 1);
  double acc = 0.0;
  double g_prev = cost_.value(uk_.col(0));
  for (int k = 0; k < K - 1; ++k) {
    const double g_mid = cost_.value(um_.col(k));
    const double g_next = cost_.value(uk_.col(k + 1));
    acc += (h / 6.0) * (g_prev + 4.0 * g_mid + g_next);
    g_prev = g_next;
  }
  return cost_.time_weight * T + acc;
}

void HsTranscription::objective_grad(const VectorXd& z, VectorXd& g) {
  gather(z);
  const int K = lay_.k_nodes;
  const int nu = lay_.nu;
  const double T = final_time(z);
  const double h = T / (K - 1);
  g.setZero(lay_.num_vars());

  double quad_sum = 0.0;  // sum over segments of (g_k + 4 g_m + g_k1)/6
  for (int k = 0; k < K; ++k) {
    const double w = (k == 0 || k == K - 1) ? h / 6.0 : h / 3.0;
    cost_.grad(uk_.col(k), gwork_);
    g.segment(lay_.node_control_offset(k), nu) =
        w * gwork_.cwiseProduct(opt_.control_scale);
  }
  for (int k = 0; k < K - 1; ++k) {
    cost_.grad(um_.col(k), gwork_);
    g.segment(lay_.mid_control_offset(k), nu) =
        (4.0 * h / 6.0) * gwork_.cwiseProduct(opt_.control_scale);
    quad_sum += (cost_.value(uk_.col(k)) + 4.0 * cost_.value(um_.col(k)) +
                 cost_.value(uk_.col(k + 1))) / 6.0;
  }
  g[lay_.time_index()] =
      opt_.time_scale * (cost_.time_weight + quad_sum / (K - 1));
}

void HsTranscription::objective_hess(const VectorXd& z, MatrixXd& H) {
  gather(z);
  const int K = lay_.k_nodes;
  const int nu = lay_.nu;
  const double T = final_time(z);
  const double h = T / (K - 1);
  H.setZero(lay_.num_vars(), lay_.num_vars());
  if (!cost_.hess) return;

  MatrixXd g2(nu, nu);
  const int ti = lay_.time_index();
  // Per control sample: weight * d2g/du2 block plus the control-time coupling
  // through h(T); the time-time entry vanishes (f is linear in T given u).
  auto add_sample = [&](int offset, const VectorXd& u, double simpson_coeff) {
    cost_.hess(u, g2);
    cost_.grad(u, gwork_);
    const double w = simpson_coeff * h;
    const double dw_dT = simpson_coeff / (K - 1);
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nu; ++j) {
        H(offset + i, offset + j) =
            w * g2(i, j) * opt_.control_scale[i] * opt_.control_scale[j];
      }
      const double cross =
          opt_.time_scale * dw_dT * gwork_[i] * opt_.control_scale[i];
      H(offset + i, ti) = cross;
      H(ti, offset + i) = cross;
    }
  };
  for (int k = 0; k < K; ++k) {
    const double coeff = (k == 0 || k == K - 1) ? 1.0 / 6.0 : 1.0 / 3.0;
    add_sample(lay_.node_control_offset(k), uk_.col(k), coeff);
  }
  for (int k = 0; k < K - 1; ++k) {
    add_sample(lay_.mid_control_offset(k), um_.col(k), 4.0 / 6.0);
  }
}

void HsTranscription::constraints(const VectorXd& z, VectorXd& c) {
  gather(z);
  node_dynamics();
  const int K = lay_.k_nodes;
  const int nx = lay_.nx;
  const double T = final_time(z);
  const double h = T / (K - 1);
  c.resize(lay_.num_constraints());
  for (int k = 0; k < K - 1; ++k) {
    xm_ = 0.5 * (xk_.col(k) + xk_.col(k + 1)) + (h / 8.0) * (fk_.col(k) - fk_.col(k + 1));
    model_.f(xm_, um_.col(k), fm_);
    dx_ = xk_.col(k + 1) - xk_.col(k) -
          (h / 6.0) * (fk_.col(k) + 4.0 * fm_ + fk_.col(k + 1));
    c.segment(k * nx, nx) = dx_.cwiseQuotient(opt_.state_scale);
  }
  c.segment((K - 1) * nx, nx) =
      (xk_.col(0) - opt_.x0).cwiseQuotient(opt_.state_scale);
  c.segment(K * nx, nx) =
      (xk_.col(K - 1) - opt_.xf).cwiseQuotient(opt_.state_scale);
}

void HsTranscription::constraints_jac(const VectorXd& z, VectorXd& c, MatrixXd& J) {
  gather(z);
  node_dynamics();
  node_jacobians();
  const int K = lay_.k_nodes;
  const int nx = lay_.nx;
  const double T = final_time(z);
  const double h = T / (K - 1);
  c.resize(lay_.num_constraints());

  const VectorXd& sx = opt_.state_scale;
  const VectorXd& su = opt_.control_scale;

  auto write_block = [&](int row0, int col0, const MatrixXd& D, const VectorXd& colscale) {
    for (int i = 0; i < static_cast<int>(D.rows()); ++i) {
      for (int j = 0; j < static_cast<int>(D.cols()); ++j) {
        J(row0 + i, col0 + j) = D(i, j) * colscale[j] / sx[i];
      }
    }
  };

  for (int k = 0; k < K - 1; ++k) {
    const auto fk = fk_.col(k);
    const auto fk1 = fk_.col(k + 1);
    xm_ = 0.5 * (xk_.col(k) + xk_.col(k + 1)) + (h / 8.0) * (fk - fk1);
    model_.f(xm_, um_.col(k), fm_);
    model_.jacobians(xm_, um_.col(k), Am_, Bm_);

    dx_ = xk_.col(k + 1) - xk_.col(k) - (h / 6.0) * (fk + 4.0 * fm_ + fk1);
    const int row0 = k * nx;
    c.segment(row0, nx) = dx_.cwiseQuotient(sx);

    Pxk_ = 0.5 * MatrixXd::Identity(nx, nx) + (h / 8.0) * Ak_[k];
    Pxk1_ = 0.5 * MatrixXd::Identity(nx, nx) - (h / 8.0) * Ak_[k + 1];

    // d(defect)/d(x_k)
    Dblock_ = -MatrixXd::Identity(nx, nx) - (h / 6.0) * (Ak_[k] + 4.0 * Am_ * Pxk_);
    write_block(row0, lay_.state_offset(k), Dblock_, sx);
    // d/d(x_k1)
    Dblock_ = MatrixXd::Identity(nx, nx) - (h / 6.0) * (Ak_[k + 1] + 4.0 * Am_ * Pxk1_);
    write_block(row0, lay_.state_offset(k + 1), Dblock_, sx);
    // d/d(u_k), d/d(u_k1), d/d(u_mid)
    MatrixXd Du = -(h / 6.0) * (Bk_[k] + (h / 2.0) * Am_ * Bk_[k]);
    write_block(row0, lay_.node_control_offset(k), Du, su);
    Du = -(h / 6.0) * (Bk_[k + 1] - (h / 2.0) * Am_ * Bk_[k + 1]);
    write_block(row0, lay_.node_control_offset(k + 1), Du, su);
    Du = -(4.0 * h / 6.0) * Bm_;
    write_block(row0, lay_.mid_control_offset(k), Du, su);
    // d/dT through h = T/(K-1)
    VectorXd dT = -(1.0 / 6.0) * (fk + 4.0 * fm_ + fk1) -
                  (h / 12.0) * (Am_ * (fk - fk1));
    dT /= (K - 1);
    for (int i = 0; i < nx; ++i) {
      J(row0 + i, lay_.time_index()) = dT[i] * opt_.time_scale / sx[i];
    }
  }

  // Boundary rows: identity in scaled coordinates.
  const int rb0 = (K - 1) * nx;
  c.segment(rb0, nx) = (xk_.col(0) - opt_.x0).cwiseQuotient(sx);
  c.segment(rb0 + nx, nx) = (xk_.col(K - 1) - opt_.xf).cwiseQuotient(sx);
  for (int i = 0; i < nx; ++i) {
    J(rb0 + i, lay_.state_offset(0) + i) = 1.0;
    J(rb0 + nx + i, lay_.state_offset(K - 1) + i) = 1.0;
  }
}

double HsTranscription::max_defect(const VectorXd& z) {
  VectorXd c;
  constraints(z, c);
  return c.head(lay_.nx * (lay_.k_nodes - 1)).lpNorm<Eigen::Infinity>();
}

double HsTranscription::max_bound_violation(const VectorXd& z) const {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    worst = std::max(worst, std::max(lb_[i] - z[i], z[i] - ub_[i]));
  }
  return std::max(worst, 0.0);
}

}  // namespace quadpol
