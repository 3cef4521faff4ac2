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

#include "fixtures.hpp"
#include "quadpol/transcription.hpp"

#include <doctest.h>

#include <cmath>

using namespace quadpol;

namespace {

// Rest-to-rest double integrator, x: 0 -> 1, T = 1, cost integral(u^2).
// Calculus of variations gives u*(t) = c1 + c2 t with v(1) = 0 and x(1) = 1
// forcing c1 = 6, c2 = -12, so J* = integral((6 - 12 t)^2) = 12.
constexpr double kMinEnergyOptimum = 12.0;

NlpProblem min_energy_problem(int K) {
  TranscriptionOptions opt;
  opt.x0 = Vec2(0.0, 0.0);
  opt.xf = Vec2(1.0, 0.0);
  opt.k_nodes = K;
  opt.t_min = 1.0;
  opt.t_max = 1.0;
  return HsTranscription::make_problem(quadpol::testing::double_integrator(),
                                       quadpol::testing::energy_cost(), opt);
}

OcpSpec fig2_spec(ObjectiveKind kind) {
  OcpSpec spec;
  spec.x0 = State{-5.0, 2.0, 0.0, 2.0, 0.0};
  spec.xf = State{};
  spec.objective.kind = kind;
  spec.objective.alpha = kind == ObjectiveKind::RegularisedTime ? 0.1 : 0.0;
  return spec;
}

bool same_trajectory(const Trajectory& a, const Trajectory& b) {
  return a.times == b.times && a.states == b.states && a.controls == b.controls &&
         a.objective_value == b.objective_value && a.converged == b.converged;
}

}  // namespace

TEST_SUITE("trajopt") {

TEST_CASE("min-energy double integrator hits the analytic optimum") {
  NlpProblem nlp = min_energy_problem(12);
  VectorXd guess = VectorXd::Zero(nlp.n);
  guess[nlp.layout.time_index()] = 1.0;
  NlpSolution s = solve_nlp(nlp, guess);
  CHECK(s.converged);
  CHECK(s.max_constraint_violation <= 1e-6);
  CHECK(std::abs(s.objective_value - kMinEnergyOptimum) / kMinEnergyOptimum < 0.01);
}

TEST_CASE("feasible stationary guess returns immediately") {
  // x0 = xf = 0 with u = 0 satisfies the dynamics and is cost-stationary.
  TranscriptionOptions opt;
  opt.x0 = Vec2(0.0, 0.0);
  opt.xf = Vec2(0.0, 0.0);
  opt.k_nodes = 6;
  opt.t_min = 1.0;
  opt.t_max = 1.0;
  NlpProblem nlp = HsTranscription::make_problem(
      quadpol::testing::double_integrator(), quadpol::testing::energy_cost(), opt);
  VectorXd guess = VectorXd::Zero(nlp.n);
  guess[nlp.layout.time_index()] = 1.0;
  NlpSolution s = solve_nlp(nlp, guess);
  CHECK(s.converged);
  CHECK(s.inner_iterations <= 2);
}

TEST_CASE("quadcopter quadratic objective from the example start") {
  Trajectory traj = solve_ocp(fig2_spec(ObjectiveKind::QuadraticControl), 1);
  REQUIRE(traj.converged);
  CHECK(traj.stats.max_defect <= 1e-6);
  CHECK(traj.points() == 59);
  CHECK(traj.times[0] == 0.0);
  // Boundary states and objective sanity.
  CHECK((traj.initial_state().vec() - fig2_spec(ObjectiveKind::QuadraticControl).x0.vec())
            .lpNorm<Eigen::Infinity>() <= 1e-9);
  CHECK(traj.final_state().vec().lpNorm<Eigen::Infinity>() <= 1e-9);
  ModelParams p;
  for (int j = 0; j < traj.points(); ++j) {
    CHECK(traj.controls(j, 0) >= -1e-9);
    CHECK(traj.controls(j, 0) <= p.ft_max + 1e-9);
    CHECK(std::abs(traj.controls(j, 1)) <= p.omega_max + 1e-9);
    CHECK(std::abs(traj.states(j, 4)) <= p.theta_max + 1e-6);
  }
  // Stored objective equals the Simpson quadrature of the stored grid.
  const double quad = evaluate_objective(traj, traj.objective);
  CHECK(quad == doctest::Approx(traj.objective_value).epsilon(1e-6));
}

TEST_CASE("time-optimal thrust is bang-bang") {
  Trajectory traj = solve_ocp(fig2_spec(ObjectiveKind::RegularisedTime), 1);
  REQUIRE(traj.converged);
  CHECK(traj.stats.max_defect <= 1e-6);
  CHECK(bang_fraction(traj, ModelParams{}) >= 0.9);
  // Regularised time optimum is shorter than the quadratic-control maneuver.
  Trajectory qoc = solve_ocp(fig2_spec(ObjectiveKind::QuadraticControl), 1);
  CHECK(traj.final_time() < qoc.final_time());
}

TEST_CASE("mirrored instances agree in cost and mirror their controls") {
  OcpSpec spec = fig2_spec(ObjectiveKind::QuadraticControl);
  OcpSpec mirrored = spec;
  mirrored.x0.x = -spec.x0.x;
  mirrored.x0.vx = -spec.x0.vx;
  mirrored.x0.theta = -spec.x0.theta;
  mirrored.xf.x = -spec.xf.x;
  mirrored.xf.vx = -spec.xf.vx;
  mirrored.xf.theta = -spec.xf.theta;
  Trajectory a = solve_ocp(spec, 1);
  Trajectory b = solve_ocp(mirrored, 1);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(std::abs(a.objective_value - b.objective_value) / a.objective_value < 0.005);
  ModelParams p;
  double worst_ft = 0.0, worst_om = 0.0;
  for (int j = 0; j < a.points(); ++j) {
    worst_ft = std::max(worst_ft, std::abs(a.controls(j, 0) - b.controls(j, 0)));
    worst_om = std::max(worst_om, std::abs(a.controls(j, 1) + b.controls(j, 1)));
  }
  CHECK(worst_ft / p.ft_max <= 0.02);
  CHECK(worst_om / p.omega_max <= 0.02);
}

TEST_CASE("regularisation never beats the pure-time optimum") {
  OcpSpec spec;
  spec.objective = {ObjectiveKind::RegularisedTime, 0.1};
  const State starts[2] = {State{-5.0, 2.0, 0.0, 2.0, 0.0},
                           State{3.0, -1.0, -4.0, 0.5, 0.2}};
  for (const State& s0 : starts) {
    spec.x0 = s0;
    Trajectory reg = solve_ocp(spec, 3);
    REQUIRE(reg.converged);
    OcpSpec pure = spec;
    pure.objective.alpha = 0.0;
    Trajectory t0 = solve_ocp(pure, 3);
    if (t0.converged) {
      CHECK(reg.objective_value >= t0.final_time() - 0.005 * t0.final_time());
    }
  }
}

TEST_CASE("halving tolerances from a converged point barely moves the objective") {
  OcpSpec spec = fig2_spec(ObjectiveKind::QuadraticControl);
  SolveOptions opt;
  Trajectory first = solve_ocp(spec, 5, opt);
  REQUIRE(first.converged);
  // Re-solve with halved tolerances warm-started from the converged grid.
  NlpProblem nlp = transcribe(spec);
  MatrixXd node_states(spec.k_nodes, 5);
  for (int k = 0; k < spec.k_nodes; ++k) node_states.row(k) = first.states.row(2 * k);
  SolverTolerances tight;
  tight.defect_tol /= 2;
  tight.stationarity_tol /= 2;
  NlpSolution refined = solve_nlp(
      nlp, nlp.transcription->pack(node_states, first.controls, first.final_time()),
      tight);
  CHECK(refined.converged);
  CHECK(std::abs(refined.objective_value - first.objective_value) /
            first.objective_value < 0.001);
}

TEST_CASE("solve_ocp is deterministic in the seed") {
  OcpSpec spec = fig2_spec(ObjectiveKind::QuadraticControl);
  Trajectory a = solve_ocp(spec, 11);
  Trajectory b = solve_ocp(spec, 11);
  CHECK(same_trajectory(a, b));
}

}  // TEST_SUITE
