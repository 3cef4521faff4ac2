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

#ifndef QUADPOL_TESTS_FIXTURES_HPP_
#define QUADPOL_TESTS_FIXTURES_HPP_

#include "quadpol/transcription.hpp"

namespace quadpol::testing {

// Double integrator: state (x, v), control u, dynamics (v, u).
inline OdeModel double_integrator() {
  OdeModel m;
  m.nx = 2;
  m.nu = 1;
  m.f = [](const VectorXd& x, const VectorXd& u, VectorXd& dx) {
    dx.resize(2);
    dx[0] = x[1];
    dx[1] = u[0];
  };
  m.jacobians = [](const VectorXd&, const VectorXd&, MatrixXd& A, MatrixXd& B) {
    A.setZero(2, 2);
    A(0, 1) = 1.0;
    B.setZero(2, 1);
    B(1, 0) = 1.0;
  };
  return m;
}

inline RunningCost energy_cost() {
  RunningCost c;
  c.value = [](const VectorXd& u) { return u[0] * u[0]; };
  c.grad = [](const VectorXd& u, VectorXd& g) {
    g.resize(1);
    g[0] = 2.0 * u[0];
  };
  c.hess = [](const VectorXd&, MatrixXd& h) { h = 2.0 * MatrixXd::Identity(1, 1); };
  c.time_weight = 0.0;
  return c;
}

}  // namespace quadpol::testing

#endif  // QUADPOL_TESTS_FIXTURES_HPP_
