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

#include "quadpol/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace quadpol {

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool State::finite() const {
  return std::isfinite(x) && std::isfinite(vx) && std::isfinite(z) &&
         std::isfinite(vz) && std::isfinite(theta);
}

bool Control::finite() const { return std::isfinite(ft) && std::isfinite(omega); }

bool ModelParams::valid() const {
  return m > 0 && g > 0 && beta > 0 && theta_max > 0 && ft_max > 0 && omega_max > 0;
}

StateDerivative derivative(const State& s, const Control& u, const ModelParams& p) {
  const double a = u.ft / p.m;
  StateDerivative d;
  d.x = s.vx;
  d.vx = a * std::sin(s.theta) - p.beta * s.vx;
  d.z = s.vz;
  d.vz = a * std::cos(s.theta) - p.g - p.beta * s.vz;
  d.theta = u.omega;
  return d;
}

void dynamics(const Vec5& x, const Vec2& u, const ModelParams& p, Vec5& dx) {
  const double a = u[0] / p.m;
  dx[0] = x[1];
  dx[1] = a * std::sin(x[4]) - p.beta * x[1];
  dx[2] = x[3];
  dx[3] = a * std::cos(x[4]) - p.g - p.beta * x[3];
  dx[4] = u[1];
}

void dynamics_jacobians(const Vec5& x, const Vec2& u, const ModelParams& p,
                        Mat5& dfdx, Mat52& dfdu) {
  const double a = u[0] / p.m;
  const double s = std::sin(x[4]);
  const double c = std::cos(x[4]);
  dfdx.setZero();
  dfdx(0, 1) = 1.0;
  dfdx(1, 1) = -p.beta;
  dfdx(1, 4) = a * c;
  dfdx(2, 3) = 1.0;
  dfdx(3, 3) = -p.beta;
  dfdx(3, 4) = -a * s;
  dfdu.setZero();
  dfdu(1, 0) = s / p.m;
  dfdu(3, 0) = c / p.m;
  dfdu(4, 1) = 1.0;
}

bool validate_control(const Control& u, const ModelParams& p) {
  return u.ft >= 0.0 && u.ft <= p.ft_max && std::abs(u.omega) <= p.omega_max;
}

Control clamp_control(const Control& u, const ModelParams& p) {
  return {std::clamp(u.ft, 0.0, p.ft_max),
          std::clamp(u.omega, -p.omega_max, p.omega_max)};
}

}  // namespace quadpol
