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

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace quadpol;

namespace {

NlpProblem box_quadratic(const VectorXd& center, const VectorXd& weights,
                         const VectorXd& lb, const VectorXd& ub) {
  NlpProblem p;
  p.n = static_cast<int>(center.size());
  p.m = 0;
  p.lb = lb;
  p.ub = ub;
  p.objective = [center, weights](const VectorXd& z) {
    return 0.5 * (weights.array() * (z - center).array().square()).sum();
  };
  p.objective_grad = [center, weights](const VectorXd& z, VectorXd& g) {
    g = weights.array() * (z - center).array();
  };
  p.constraints = [](const VectorXd&, VectorXd& c) { c.resize(0); };
  p.constraints_jac = [](const VectorXd&, VectorXd& c, MatrixXd&) { c.resize(0); };
  return p;
}

}  // namespace

TEST_SUITE("auglag") {

TEST_CASE("box-constrained quadratic lands on the clamped center") {
  VectorXd center(3), weights(3), lb(3), ub(3);
  center << 2.0, -3.0, 0.25;
  weights << 1.0, 4.0, 0.5;
  lb << -1.0, -1.0, -1.0;
  ub << 1.0, 1.0, 1.0;
  NlpProblem p = box_quadratic(center, weights, lb, ub);
  NlpSolution s = solve_nlp(p, VectorXd::Zero(3));
  CHECK(s.converged);
  CHECK(s.z[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(s.z[1] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(s.z[2] == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("equality-constrained quadratic: min ||z||^2 with z0 + z1 = 1") {
  NlpProblem p;
  p.n = 2;
  p.m = 1;
  p.lb = VectorXd::Constant(2, -10.0);
  p.ub = VectorXd::Constant(2, 10.0);
  p.objective = [](const VectorXd& z) { return z.squaredNorm(); };
  p.objective_grad = [](const VectorXd& z, VectorXd& g) { g = 2.0 * z; };
  p.constraints = [](const VectorXd& z, VectorXd& c) {
    c.resize(1);
    c[0] = z[0] + z[1] - 1.0;
  };
  p.constraints_jac = [](const VectorXd& z, VectorXd& c, MatrixXd& J) {
    c.resize(1);
    c[0] = z[0] + z[1] - 1.0;
    J(0, 0) = 1.0;
    J(0, 1) = 1.0;
  };
  NlpSolution s = solve_nlp(p, VectorXd::Zero(2));
  CHECK(s.converged);
  CHECK(s.max_constraint_violation <= 1e-6);
  CHECK(s.z[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(s.z[1] == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("linear objective on the unit circle") {
  NlpProblem p;
  p.n = 2;
  p.m = 1;
  p.lb = VectorXd::Constant(2, -5.0);
  p.ub = VectorXd::Constant(2, 5.0);
  p.objective = [](const VectorXd& z) { return z[0] + z[1]; };
  p.objective_grad = [](const VectorXd&, VectorXd& g) { g = VectorXd::Ones(2); };
  p.constraints = [](const VectorXd& z, VectorXd& c) {
    c.resize(1);
    c[0] = z.squaredNorm() - 1.0;
  };
  p.constraints_jac = [](const VectorXd& z, VectorXd& c, MatrixXd& J) {
    c.resize(1);
    c[0] = z.squaredNorm() - 1.0;
    J(0, 0) = 2.0 * z[0];
    J(0, 1) = 2.0 * z[1];
  };
  VectorXd guess(2);
  guess << -0.3, -0.4;
  NlpSolution s = solve_nlp(p, guess);
  CHECK(s.converged);
  const double r = -std::sqrt(0.5);
  CHECK(s.z[0] == doctest::Approx(r).epsilon(1e-4));
  CHECK(s.z[1] == doctest::Approx(r).epsilon(1e-4));
}

TEST_CASE("rosenbrock without constraints") {
  NlpProblem p;
  p.n = 2;
  p.m = 0;
  p.lb = VectorXd::Constant(2, -10.0);
  p.ub = VectorXd::Constant(2, 10.0);
  p.objective = [](const VectorXd& z) {
    const double a = 1.0 - z[0];
    const double b = z[1] - z[0] * z[0];
    return a * a + 100.0 * b * b;
  };
  p.objective_grad = [](const VectorXd& z, VectorXd& g) {
    const double b = z[1] - z[0] * z[0];
    g.resize(2);
    g[0] = -2.0 * (1.0 - z[0]) - 400.0 * z[0] * b;
    g[1] = 200.0 * b;
  };
  p.constraints = [](const VectorXd&, VectorXd& c) { c.resize(0); };
  p.constraints_jac = [](const VectorXd&, VectorXd& c, MatrixXd&) { c.resize(0); };
  SolverTolerances tol;
  tol.max_inner = 500;
  VectorXd guess(2);
  guess << -1.2, 1.0;
  NlpSolution s = solve_nlp(p, guess, tol);
  CHECK(s.converged);
  CHECK(s.z[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(s.z[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("already-converged guess returns immediately") {
  VectorXd center(2), weights(2);
  center << 0.2, -0.4;
  weights << 1.0, 2.0;
  NlpProblem p = box_quadratic(center, weights, VectorXd::Constant(2, -1.0),
                               VectorXd::Constant(2, 1.0));
  NlpSolution s = solve_nlp(p, center);
  CHECK(s.converged);
  CHECK(s.inner_iterations == 0);
  CHECK(s.outer_iterations == 1);
}

TEST_CASE("non-finite objective at the guess is a diagnostic error") {
  NlpProblem p;
  p.n = 1;
  p.m = 0;
  p.lb = VectorXd::Constant(1, -1.0);
  p.ub = VectorXd::Constant(1, 1.0);
  p.objective = [](const VectorXd&) { return std::numeric_limits<double>::quiet_NaN(); };
  p.objective_grad = [](const VectorXd&, VectorXd& g) { g = VectorXd::Zero(1); };
  p.constraints = [](const VectorXd&, VectorXd& c) { c.resize(0); };
  p.constraints_jac = [](const VectorXd&, VectorXd& c, MatrixXd&) { c.resize(0); };
  CHECK_THROWS_AS(solve_nlp(p, VectorXd::Zero(1)), std::domain_error);
}

TEST_CASE("iteration exhaustion reports the best iterate without throwing") {
  NlpProblem p;
  p.n = 2;
  p.m = 1;
  p.lb = VectorXd::Constant(2, -5.0);
  p.ub = VectorXd::Constant(2, 5.0);
  p.objective = [](const VectorXd& z) { return z.squaredNorm(); };
  p.objective_grad = [](const VectorXd& z, VectorXd& g) { g = 2.0 * z; };
  p.constraints = [](const VectorXd& z, VectorXd& c) {
    c.resize(1);
    c[0] = std::exp(z[0]) + z[1] - 4.0;
  };
  p.constraints_jac = [](const VectorXd& z, VectorXd& c, MatrixXd& J) {
    c.resize(1);
    c[0] = std::exp(z[0]) + z[1] - 4.0;
    J(0, 0) = std::exp(z[0]);
    J(0, 1) = 1.0;
  };
  SolverTolerances tight;
  tight.max_outer = 1;
  tight.max_inner = 2;
  NlpSolution s = solve_nlp(p, VectorXd::Zero(2), tight);
  CHECK_FALSE(s.converged);
  CHECK(s.z.size() == 2);
  CHECK(s.message != "");
}

}  // TEST_SUITE
