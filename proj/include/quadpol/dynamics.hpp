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

#ifndef QUADPOL_DYNAMICS_HPP_
#define QUADPOL_DYNAMICS_HPP_

#include "quadpol/common.hpp"

namespace quadpol {

// Planar quadcopter state. Component order is fixed as (x, vx, z, vz, theta)
// everywhere, including serialized artifacts.
struct State {
  double x = 0.0;      // horizontal position [m]
  double vx = 0.0;     // horizontal velocity [m/s]
  double z = 0.0;      // vertical position [m]
  double vz = 0.0;     // vertical velocity [m/s]
  double theta = 0.0;  // pitch angle [rad]

  Vec5 vec() const {
    Vec5 v;
    v << x, vx, z, vz, theta;
    return v;
  }
  static State from_vec(const Vec5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }
  bool finite() const;
};

struct Control {
  double ft = 0.0;     // total thrust [N]
  double omega = 0.0;  // pitch rate [rad/s]

  Vec2 vec() const { return Vec2(ft, omega); }
  static Control from_vec(const Vec2& v) { return {v[0], v[1]}; }
  bool finite() const;
};

// Physical parameters; defaults are sized to a small consumer drone.
struct ModelParams {
  double m = 0.38905;           // mass [kg]
  double g = 9.81;              // gravitational acceleration [m/s^2]
  double beta = 0.5;            // linear drag coefficient [1/s]
  double theta_max = kPi / 4;   // pitch limit [rad]
  double ft_max = 9.1;          // thrust limit [N]
  double omega_max = 35.0;      // pitch-rate limit [rad/s]

  Control hover() const { return {m * g, 0.0}; }
  bool valid() const;
};

// Time derivative of State; same component order, per-second units.
struct StateDerivative {
  double x = 0.0;
  double vx = 0.0;
  double z = 0.0;
  double vz = 0.0;
  double theta = 0.0;

  Vec5 vec() const {
    Vec5 v;
    v << x, vx, z, vz, theta;
    return v;
  }
};

// Right-hand side of the quadcopter ODE. Total on finite inputs; controls are
// not required to be inside the feasible box (solver iterates may leave it).
StateDerivative derivative(const State& s, const Control& u, const ModelParams& p);

// Vector forms for solver hot paths.
void dynamics(const Vec5& x, const Vec2& u, const ModelParams& p, Vec5& dx);
void dynamics_jacobians(const Vec5& x, const Vec2& u, const ModelParams& p,
                        Mat5& dfdx, Mat52& dfdu);

// True iff 0 <= ft <= ft_max and |omega| <= omega_max.
bool validate_control(const Control& u, const ModelParams& p);

// Componentwise projection onto the control box; idempotent.
Control clamp_control(const Control& u, const ModelParams& p);

}  // namespace quadpol

#endif  // QUADPOL_DYNAMICS_HPP_
