#include "phdmd/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "phdmd/error.hpp"

namespace phdmd {

namespace {

// Midpoint recurrence for E x' = A x + B u, y = C x + D u.
Trajectory integrate_midpoint(const Matrix& e, const Matrix& a, const Matrix& b, const Matrix& c,
                              const Matrix& d, const Matrix& u, const Vector& x0, double dt,
                              bool allow_divergence) {
  require(dt > 0.0, "simulate: dt must be positive");
  const auto n = a.rows();
  require(e.rows() == n && e.cols() == n && a.cols() == n, "simulate: state matrices must be " +
                                                               std::to_string(n) + "x" +
                                                               std::to_string(n));
  require(x0.size() == n, "simulate: x0 has " + std::to_string(x0.size()) +
                              " entries, state dimension is " + std::to_string(n));
  require(b.rows() == n && b.cols() == u.rows(),
          "simulate: input matrix does not match " + std::to_string(u.rows()) + " input channels");
  require(u.cols() >= 1, "simulate: need at least one input sample");

  const auto samples = u.cols();
  Trajectory traj;
  traj.dt = dt;
  traj.t.resize(samples);
  for (Eigen::Index i = 0; i < samples; ++i) traj.t[i] = dt * static_cast<double>(i);
  traj.U = u;
  traj.X.resize(n, samples);
  traj.X.col(0) = x0;

  if (n > 0 && samples > 1) {
    const Matrix lhs = e / dt - 0.5 * a;
    const Matrix rhs = e / dt + 0.5 * a;
    Eigen::PartialPivLU<Matrix> lu(lhs);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14)) {
      fail(ErrorKind::Numerical, "simulate: step matrix is singular (rcond=" +
                                     std::to_string(rcond) + ")");
    }
    for (Eigen::Index i = 0; i + 1 < samples; ++i) {
      const Vector forcing = rhs * traj.X.col(i) + 0.5 * b * (u.col(i + 1) + u.col(i));
      traj.X.col(i + 1) = lu.solve(forcing);
    }
  }
  traj.Y = c * traj.X + d * u;
  if (!allow_divergence && (!traj.X.allFinite() || !traj.Y.allFinite())) {
    fail(ErrorKind::Numerical, "simulate: trajectory diverged to non-finite values");
  }
  return traj;
}

}  // namespace

void check_trajectory(const Trajectory& traj) {
  const auto samples = traj.t.size();
  require(traj.U.cols() == samples && traj.X.cols() == samples && traj.Y.cols() == samples,
          "trajectory: U, X, Y and t must have the same number of samples");
  require(samples < 2 || traj.dt > 0.0, "trajectory: dt must be positive");
  const double slack = 1e-12 * std::max(1.0, std::abs(samples > 0 ? traj.t[samples - 1] : 0.0));
  for (Eigen::Index i = 0; i + 1 < samples; ++i) {
    if (std::abs(traj.t[i + 1] - traj.t[i] - traj.dt) > slack) {
      fail(ErrorKind::InvalidArgument,
           "trajectory: time grid is not uniform at sample " + std::to_string(i + 1));
    }
  }
}

InputSignal InputSignal::table(std::vector<double> times, std::vector<double> values) {
  require(times.size() == values.size() && !times.empty(),
          "input table needs matching, non-empty times and values");
  require(std::is_sorted(times.begin(), times.end()) &&
              std::adjacent_find(times.begin(), times.end()) == times.end(),
          "input table times must be strictly increasing");
  InputSignal sig;
  sig.kind = Kind::Table;
  sig.times = std::move(times);
  sig.values = std::move(values);
  return sig;
}

double InputSignal::operator()(double t) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::ExpSin:
      return amplitude * std::exp(-t / 2.0) * std::sin(t * t);
    case Kind::ExpCos:
      return amplitude * std::exp(-t / 2.0) * std::cos(t * t);
    case Kind::StepChirp:
      return amplitude * ((t >= 1.0 ? 0.5 : 0.0) + std::exp(-t / 4.0) * std::sin(t + t * t / 4.0));
    case Kind::Table: {
      const double slack = 1e-12 * std::max(1.0, std::abs(times.back()));
      if (t < times.front() - slack || t > times.back() + slack) {
        fail(ErrorKind::InvalidArgument, "input table queried at t=" + std::to_string(t) +
                                             " outside [" + std::to_string(times.front()) + ", " +
                                             std::to_string(times.back()) + "]");
      }
      if (t <= times.front()) return amplitude * values.front();
      if (t >= times.back()) return amplitude * values.back();
      const auto it = std::upper_bound(times.begin(), times.end(), t);
      const auto hi = static_cast<std::size_t>(it - times.begin());
      const auto lo = hi - 1;
      const double w = (t - times[lo]) / (times[hi] - times[lo]);
      return amplitude * ((1.0 - w) * values[lo] + w * values[hi]);
    }
  }
  return 0.0;
}

Vector eval_input(const InputSpec& inputs, double t) {
  require(t >= 0.0, "eval_input: t must be non-negative");
  Vector u(static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t k = 0; k < inputs.size(); ++k) u[static_cast<Eigen::Index>(k)] = inputs[k](t);
  return u;
}

Matrix sample_inputs(const InputSpec& inputs, double dt, Eigen::Index steps) {
  require(dt > 0.0, "sample_inputs: dt must be positive");
  require(steps >= 0, "sample_inputs: steps must be non-negative");
  Matrix u(static_cast<Eigen::Index>(inputs.size()), steps + 1);
  for (Eigen::Index i = 0; i <= steps; ++i) u.col(i) = eval_input(inputs, dt * static_cast<double>(i));
  return u;
}

Trajectory simulate_midpoint(const PHSystem& sys, const Matrix& U, const Vector& x0, double dt) {
  require(U.rows() == sys.port_dim(), "simulate_midpoint: system has " +
                                          std::to_string(sys.port_dim()) + " ports but " +
                                          std::to_string(U.rows()) + " input rows were given");
  return integrate_midpoint(sys.H, sys.J - sys.R, sys.G - sys.P, (sys.G + sys.P).transpose(),
                            sys.S - sys.N, U, x0, dt, false);
}

Trajectory simulate_midpoint(const PHSystem& sys, const InputSpec& inputs, const Vector& x0,
                             double dt, Eigen::Index steps) {
  require(static_cast<Eigen::Index>(inputs.size()) == sys.port_dim(),
          "simulate_midpoint: system has " + std::to_string(sys.port_dim()) + " ports but " +
              std::to_string(inputs.size()) + " input signals were given");
  return simulate_midpoint(sys, sample_inputs(inputs, dt, steps), x0, dt);
}

Trajectory simulate_lti(const LTISystem& sys, const Matrix& U, const Vector& x0, double dt) {
  require(U.rows() == sys.input_dim(), "simulate_lti: model has " +
                                           std::to_string(sys.input_dim()) + " inputs but " +
                                           std::to_string(U.rows()) + " input rows were given");
  if (!sys.discrete) {
    const auto n = sys.state_dim();
    // Unstructured models may be unstable; divergence is reported, not thrown.
    return integrate_midpoint(Matrix::Identity(n, n), sys.A, sys.B, sys.C, sys.D, U, x0, dt, true);
  }
  require(dt > 0.0, "simulate_lti: dt must be positive");
  require(x0.size() == sys.state_dim(), "simulate_lti: x0 has wrong dimension");
  const auto samples = U.cols();
  Trajectory traj;
  traj.dt = dt;
  traj.t.resize(samples);
  for (Eigen::Index i = 0; i < samples; ++i) traj.t[i] = dt * static_cast<double>(i);
  traj.U = U;
  traj.X.resize(sys.state_dim(), samples);
  traj.X.col(0) = x0;
  for (Eigen::Index i = 0; i + 1 < samples; ++i) {
    traj.X.col(i + 1) = sys.A * traj.X.col(i) + sys.B * U.col(i);
  }
  traj.Y = sys.C * traj.X + sys.D * U;
  return traj;
}

std::vector<double> midpoint_residuals(const PHSystem& sys, const Trajectory& traj) {
  check_trajectory(traj);
  std::vector<double> out;
  if (traj.samples() < 2) return out;
  const Matrix a = sys.J - sys.R;
  const Matrix b = sys.G - sys.P;
  out.reserve(static_cast<std::size_t>(traj.samples() - 1));
  for (Eigen::Index i = 0; i + 1 < traj.samples(); ++i) {
    const Vector xbar = 0.5 * (traj.X.col(i + 1) + traj.X.col(i));
    const Vector ubar = 0.5 * (traj.U.col(i + 1) + traj.U.col(i));
    const Vector r =
        sys.H * (traj.X.col(i + 1) - traj.X.col(i)) / traj.dt - a * xbar - b * ubar;
    out.push_back(r.norm());
  }
  return out;
}

Trajectory add_noise(const Trajectory& traj, double stddev, std::uint64_t seed) {
  require(stddev >= 0.0, "add_noise: stddev must be non-negative");
  Trajectory noisy = traj;
  if (stddev == 0.0) return noisy;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  for (Eigen::Index j = 0; j < noisy.X.cols(); ++j) {
    for (Eigen::Index i = 0; i < noisy.X.rows(); ++i) noisy.X(i, j) += dist(gen);
  }
  for (Eigen::Index j = 0; j < noisy.Y.cols(); ++j) {
    for (Eigen::Index i = 0; i < noisy.Y.rows(); ++i) noisy.Y(i, j) += dist(gen);
  }
  return noisy;
}

}  // namespace phdmd
