#pragma once

#include <cstdint>
#include <vector>

#include "phdmd/ph_model.hpp"

namespace phdmd {

/// Uniformly sampled input/state/output record. Column i of U, X and Y holds
/// the sample at t[i] = t[0] + i * dt.
struct Trajectory {
  double dt = 0.0;
  Vector t;
  Matrix U;  // m x (M+1)
  Matrix X;  // n x (M+1)
  Matrix Y;  // p x (M+1), p == m for pH data

  Eigen::Index samples() const { return t.size(); }
};

/// Throws InvalidArgument unless column counts agree and the time grid is
/// uniform with step dt.
void check_trajectory(const Trajectory& traj);

/// Scalar signal driving one input port.
struct InputSignal {
  enum class Kind {
    Zero,
    ExpSin,     // exp(-t/2) sin(t^2)
    ExpCos,     // exp(-t/2) cos(t^2)
    StepChirp,  // 0.5 * [t >= 1] + exp(-t/4) sin(t + t^2 / 4)
    Table,      // piecewise linear through (times, values)
  };

  Kind kind = Kind::Zero;
  double amplitude = 1.0;
  std::vector<double> times;   // Table only, strictly increasing
  std::vector<double> values;  // Table only

  static InputSignal zero() { return {}; }
  static InputSignal exp_sin(double amplitude = 1.0) { return {Kind::ExpSin, amplitude, {}, {}}; }
  static InputSignal exp_cos(double amplitude = 1.0) { return {Kind::ExpCos, amplitude, {}, {}}; }
  static InputSignal step_chirp(double amplitude = 1.0) {
    return {Kind::StepChirp, amplitude, {}, {}};
  }
  static InputSignal table(std::vector<double> times, std::vector<double> values);

  double operator()(double t) const;
};

using InputSpec = std::vector<InputSignal>;

/// Values of every port at time t (t >= 0).
Vector eval_input(const InputSpec& inputs, double t);

/// m x (steps+1) matrix of inputs sampled at i * dt.
Matrix sample_inputs(const InputSpec& inputs, double dt, Eigen::Index steps);

/// Implicit midpoint integration of the pH system with inputs averaged over
/// each step. The step matrix H/dt - (J-R)/2 is factored once. Outputs are
/// evaluated pointwise, y_i = C x_i + D u_i.
Trajectory simulate_midpoint(const PHSystem& sys, const InputSpec& inputs, const Vector& x0,
                             double dt, Eigen::Index steps);
Trajectory simulate_midpoint(const PHSystem& sys, const Matrix& U, const Vector& x0, double dt);

/// Same scheme for a standard continuous-time model (H = I); discrete-time
/// models are iterated directly, x_{k+1} = A x_k + B u_k.
Trajectory simulate_lti(const LTISystem& sys, const Matrix& U, const Vector& x0, double dt);

/// Per-step norm of H (x_{i+1}-x_i)/dt - (J-R) xbar_i - (G-P) ubar_i.
std::vector<double> midpoint_residuals(const PHSystem& sys, const Trajectory& traj);

/// Adds i.i.d. N(0, stddev^2) noise to X and Y (U and t untouched). The
/// generator is seeded per call.
Trajectory add_noise(const Trajectory& traj, double stddev, std::uint64_t seed);

}  // namespace phdmd
