#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "phdmd/data_assembly.hpp"
#include "phdmd/procrustes.hpp"

namespace phdmd {

/// ||Z - (J - R) T||_F
double residual_norm(const Matrix& Z, const Matrix& T, const JRPair& pair);
/// ||T^T (Z - (J - R) T)||_F
double weighted_residual_norm(const Matrix& Z, const Matrix& T, const JRPair& pair);

/// Objective value normalized by the matching norm of the data. When that norm
/// is zero the value cannot be normalized: `degenerate` is set and `relative`
/// holds the absolute value.
struct Objective {
  double absolute = 0.0;
  double relative = 0.0;
  bool degenerate = false;
};

/// f = ||Z - (J-R) T||_F / ||Z||_F
Objective objective_f(const Matrix& Z, const Matrix& T, const JRPair& pair);
Objective objective_f(const DataMatrices& data, const JRPair& pair);
/// f_T = ||T^T Z - T^T (J-R) T||_F / ||T^T Z||_F
Objective objective_fT(const Matrix& Z, const Matrix& T, const JRPair& pair);
Objective objective_fT(const DataMatrices& data, const JRPair& pair);

/// Per-step dissipation residual DeltaH_i - ybar_i^T ubar_i with
/// DeltaH_i = (H(x_{i+1}) - H(x_i)) / dt. Non-positive for data produced by
/// midpoint integration of a pH system.
std::vector<double> dissipation_residuals(const Matrix& H, const Trajectory& traj);

/// Magnitude against which dissipation residuals are compared: the largest
/// of max_i |DeltaH_i|-sized energy terms and supplied power, at least 1e-300.
double dissipation_scale(const Matrix& H, const Trajectory& traj);

struct ErrorSummary {
  double rel_l2 = 0.0;
  double rel_linf = 0.0;
  std::vector<double> abs_error;  // per-sample Euclidean norm of the difference
};

/// Relative discrete l2 and l-infinity errors of y_test against y_ref
/// (rows = channels, columns = samples).
ErrorSummary trajectory_error(const Matrix& y_ref, const Matrix& y_test);

/// Bound ||Z - (J-R) T|| <= c ||T^T Z - T^T (J-R) T|| with c = ||pinv(T)||_F,
/// valid when T has full row rank.
struct CorrelationBound {
  double lhs = 0.0;       // unweighted residual
  double weighted = 0.0;  // weighted residual
  double c = 0.0;
  double rhs = 0.0;       // c * weighted
};

CorrelationBound lemma38_bound(const Matrix& Z, const Matrix& T, const JRPair& pair,
                               double truncation_tol = kDefaultTruncationTol);

using AnyModel = std::variant<PHSystem, LTISystem>;

/// G(i w) for continuous models, G(exp(i w dt)) for discrete ones.
Eigen::MatrixXcd transfer_at(const AnyModel& model, double omega);

/// Grid-sampled transfer-function norms. Both are approximations from below
/// of the true norms on the sampled band:
///   h_inf = max_w ||G(i w)||_F
///   h2    = sqrt(1/pi * trapezoid(||G(i w)||_F^2))  (integrand is even in w)
struct SampledNorms {
  std::vector<double> omega;
  std::vector<double> magnitude;
  double h_inf = 0.0;
  double h2 = 0.0;
};

/// `count` points log-spaced on [lo, hi].
std::vector<double> log_frequency_grid(double lo = 1e-3, double hi = 1e3, int count = 400);

SampledNorms transfer_eval(const AnyModel& model, const std::vector<double>& omega);
/// Norms of the error system G_ref - G_test (state dimensions may differ).
SampledNorms transfer_error(const AnyModel& ref, const AnyModel& test,
                            const std::vector<double>& omega);

}  // namespace phdmd
