#include "phdmd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "phdmd/error.hpp"

namespace phdmd {

namespace {

void check_pair(const Matrix& Z, const Matrix& T, const JRPair& pair, const char* op) {
  const auto n = T.rows();
  require(Z.rows() == n && Z.cols() == T.cols(),
          std::string(op) + ": Z and T must have the same shape");
  require(pair.J.rows() == n && pair.J.cols() == n && pair.R.rows() == n && pair.R.cols() == n,
          std::string(op) + ": J and R must be " + std::to_string(n) + "x" + std::to_string(n));
}

Objective normalize(double absolute, double denominator) {
  Objective o;
  o.absolute = absolute;
  if (denominator > 0.0) {
    o.relative = absolute / denominator;
  } else {
    o.relative = absolute;
    o.degenerate = true;
  }
  return o;
}

// ||T^T E||_F = ||S U^T E||_F for T = U S V^T, without forming the M x M product.
double weighted_norm(const linalg::SkinnySVD& svd, const Matrix& e) {
  if (svd.rank == 0) return 0.0;
  return (svd.S.asDiagonal() * (svd.U.transpose() * e)).norm();
}

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

CMatrix resolvent_product(const CMatrix& lhs, const CMatrix& rhs, const char* what) {
  if (lhs.rows() == 0) return CMatrix::Zero(0, rhs.cols());
  Eigen::PartialPivLU<CMatrix> lu(lhs);
  if (!(lu.rcond() > 1e-14)) {
    fail(ErrorKind::Numerical, std::string(what) + " is singular to working precision");
  }
  return lu.solve(rhs);
}

}  // namespace

double residual_norm(const Matrix& Z, const Matrix& T, const JRPair& pair) {
  check_pair(Z, T, pair, "residual_norm");
  return (Z - (pair.J - pair.R) * T).norm();
}

double weighted_residual_norm(const Matrix& Z, const Matrix& T, const JRPair& pair) {
  check_pair(Z, T, pair, "weighted_residual_norm");
  return weighted_norm(linalg::skinny_svd(T, 0.0), Z - (pair.J - pair.R) * T);
}

Objective objective_f(const Matrix& Z, const Matrix& T, const JRPair& pair) {
  return normalize(residual_norm(Z, T, pair), Z.norm());
}

Objective objective_f(const DataMatrices& data, const JRPair& pair) {
  return objective_f(data.Z, data.T, pair);
}

Objective objective_fT(const Matrix& Z, const Matrix& T, const JRPair& pair) {
  check_pair(Z, T, pair, "objective_fT");
  const auto svd = linalg::skinny_svd(T, 0.0);
  return normalize(weighted_norm(svd, Z - (pair.J - pair.R) * T), weighted_norm(svd, Z));
}

Objective objective_fT(const DataMatrices& data, const JRPair& pair) {
  return objective_fT(data.Z, data.T, pair);
}

std::vector<double> dissipation_residuals(const Matrix& H, const Trajectory& traj) {
  check_trajectory(traj);
  require(traj.samples() >= 2, "dissipation_residuals: need at least 2 samples");
  require(H.rows() == traj.X.rows() && H.cols() == traj.X.rows(),
          "dissipation_residuals: H does not match the state dimension");
  require(traj.U.rows() == traj.Y.rows(),
          "dissipation_residuals: inputs and outputs must have the same dimension");
  const auto steps = traj.samples() - 1;
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (Eigen::Index i = 0; i < steps; ++i) {
    const Vector x0 = traj.X.col(i);
    const Vector x1 = traj.X.col(i + 1);
    const double dh = 0.5 * (x1.dot(H * x1) - x0.dot(H * x0)) / traj.dt;
    const Vector ybar = 0.5 * (traj.Y.col(i) + traj.Y.col(i + 1));
    const Vector ubar = 0.5 * (traj.U.col(i) + traj.U.col(i + 1));
    out[static_cast<std::size_t>(i)] = dh - ybar.dot(ubar);
  }
  return out;
}

double dissipation_scale(const Matrix& H, const Trajectory& traj) {
  check_trajectory(traj);
  double scale = 1e-300;
  const auto steps = traj.samples() - 1;
  for (Eigen::Index i = 0; i < steps; ++i) {
    const Vector x0 = traj.X.col(i);
    const Vector x1 = traj.X.col(i + 1);
    const double energy = 0.5 * (std::abs(x1.dot(H * x1)) + std::abs(x0.dot(H * x0))) / traj.dt;
    const Vector ybar = 0.5 * (traj.Y.col(i) + traj.Y.col(i + 1));
    const Vector ubar = 0.5 * (traj.U.col(i) + traj.U.col(i + 1));
    scale = std::max({scale, energy, ybar.norm() * ubar.norm()});
  }
  return scale;
}

ErrorSummary trajectory_error(const Matrix& y_ref, const Matrix& y_test) {
  require(y_ref.rows() == y_test.rows() && y_ref.cols() == y_test.cols(),
          "trajectory_error: series have different shapes (" + std::to_string(y_ref.rows()) + "x" +
              std::to_string(y_ref.cols()) + " vs " + std::to_string(y_test.rows()) + "x" +
              std::to_string(y_test.cols()) + ")");
  const double ref_l2 = y_ref.norm();
  const double ref_linf = y_ref.size() ? y_ref.cwiseAbs().maxCoeff() : 0.0;
  if (!(ref_l2 > 0.0)) fail(ErrorKind::Numerical, "trajectory_error: reference series is zero");

  const Matrix diff = y_test - y_ref;
  ErrorSummary out;
  out.rel_l2 = diff.norm() / ref_l2;
  out.rel_linf = diff.cwiseAbs().maxCoeff() / ref_linf;
  out.abs_error.resize(static_cast<std::size_t>(diff.cols()));
  for (Eigen::Index i = 0; i < diff.cols(); ++i) {
    out.abs_error[static_cast<std::size_t>(i)] = diff.col(i).norm();
  }
  return out;
}

CorrelationBound lemma38_bound(const Matrix& Z, const Matrix& T, const JRPair& pair,
                               double truncation_tol) {
  check_pair(Z, T, pair, "lemma38_bound");
  const auto svd = linalg::skinny_svd(T, truncation_tol);
  if (svd.rank < T.rows()) {
    fail(ErrorKind::Numerical, "lemma38_bound: T has rank " + std::to_string(svd.rank) +
                                   " < " + std::to_string(T.rows()) +
                                   " rows; the bound does not apply");
  }
  CorrelationBound b;
  b.lhs = residual_norm(Z, T, pair);
  b.weighted = weighted_residual_norm(Z, T, pair);
  b.c = svd.S.cwiseInverse().norm();
  b.rhs = b.c * b.weighted;
  return b;
}

Eigen::MatrixXcd transfer_at(const AnyModel& model, double omega) {
  if (const auto* ph = std::get_if<PHSystem>(&model)) {
    const Complex s(0.0, omega);
    const CMatrix lhs = s * ph->H.cast<Complex>() - (ph->J - ph->R).cast<Complex>();
    const CMatrix b = (ph->G - ph->P).cast<Complex>();
    const CMatrix c = (ph->G + ph->P).transpose().cast<Complex>();
    const CMatrix d = (ph->S - ph->N).cast<Complex>();
    return c * resolvent_product(lhs, b, "i w H - (J - R)") + d;
  }
  const auto& lti = std::get<LTISystem>(model);
  const Complex s = lti.discrete ? std::exp(Complex(0.0, omega * lti.dt)) : Complex(0.0, omega);
  const auto n = lti.state_dim();
  const CMatrix lhs = s * CMatrix::Identity(n, n) - lti.A.cast<Complex>();
  return lti.C.cast<Complex>() * resolvent_product(lhs, lti.B.cast<Complex>(), "s I - A") +
         lti.D.cast<Complex>();
}

std::vector<double> log_frequency_grid(double lo, double hi, int count) {
  require(lo > 0.0 && hi >= lo && count >= 1, "log_frequency_grid: need 0 < lo <= hi, count >= 1");
  std::vector<double> w(static_cast<std::size_t>(count));
  if (count == 1) {
    w[0] = lo;
    return w;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) w[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
  return w;
}

namespace {

template <class Eval>
SampledNorms sample_norms(const std::vector<double>& omega, Eval eval) {
  require(!omega.empty(), "transfer_eval: frequency grid is empty");
  SampledNorms out;
  out.omega = omega;
  out.magnitude.reserve(omega.size());
  for (double w : omega) out.magnitude.push_back(eval(w).norm());
  out.h_inf = *std::max_element(out.magnitude.begin(), out.magnitude.end());
  double integral = 0.0;
  for (std::size_t i = 1; i < omega.size(); ++i) {
    const double a = out.magnitude[i - 1];
    const double b = out.magnitude[i];
    integral += 0.5 * (a * a + b * b) * (omega[i] - omega[i - 1]);
  }
  out.h2 = std::sqrt(integral / std::numbers::pi);
  return out;
}

std::pair<Eigen::Index, Eigen::Index> io_dims(const AnyModel& m) {
  if (const auto* ph = std::get_if<PHSystem>(&m)) return {ph->port_dim(), ph->port_dim()};
  const auto& lti = std::get<LTISystem>(m);
  return {lti.output_dim(), lti.input_dim()};
}

}  // namespace

SampledNorms transfer_eval(const AnyModel& model, const std::vector<double>& omega) {
  return sample_norms(omega, [&](double w) { return transfer_at(model, w); });
}

SampledNorms transfer_error(const AnyModel& ref, const AnyModel& test,
                            const std::vector<double>& omega) {
  const auto a = io_dims(ref);
  const auto b = io_dims(test);
  require(a == b, "transfer_error: models have different input/output dimensions (" +
                      std::to_string(a.first) + "x" + std::to_string(a.second) + " vs " +
                      std::to_string(b.first) + "x" + std::to_string(b.second) + ")");
  return sample_norms(omega, [&](double w) {
    return CMatrix(transfer_at(ref, w) - transfer_at(test, w));
  });
}

}  // namespace phdmd
