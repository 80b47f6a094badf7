#pragma once

#include <string>
#include <vector>

#include "phdmd/data_assembly.hpp"
#include "phdmd/procrustes.hpp"

namespace phdmd {

struct SolverOptions {
  double epsilon = 1e-10;  // stop when stopping_metric(prev, next) <= epsilon
  int max_iters = 5000;
  double alpha1 = 0.1;     // initial momentum parameter, in (0, 1)
  bool restart = true;     // gradient-step restart when the objective increases
  double shrink = 0.5;     // backtracking step factor
  int max_halvings = 30;
  double armijo = 1e-4;
  double truncation_tol = kDefaultTruncationTol;
};

/// Throws InvalidArgument for out-of-range options.
void check_options(const SolverOptions& opts);

enum class Termination { Converged, MaxIters, Stalled };
const char* to_string(Termination t);

struct IterationRecord {
  double f = 0.0;        // relative unweighted objective
  double f_T = 0.0;      // relative weighted objective
  double step = 0.0;     // stopping_metric against the previous iterate (0 for the first)
  bool restart = false;  // iterate produced by the gradient-step safeguard
};

/// history[k] describes iterate k; history.size() == iterations + 1.
struct SolverReport {
  int iterations = 0;
  std::vector<IterationRecord> history;
  Termination termination = Termination::MaxIters;
  int restarts = 0;
  double lipschitz = 0.0;  // sigma_1(T)^2
  double q = 0.0;          // sigma_r(T)^2 / L
  Eigen::Index rank_T = 0;
};

std::string to_json(const SolverReport& report);

struct SolverResult {
  JRPair pair;
  SolverReport report;
};

/// Alternates the closed-form skew-symmetric solve for J with accelerated
/// projected gradient steps on the PSD part R. Every iterate is exactly skew /
/// PSD. Iterate k is the pair (J(R_k), R_k) where J(R) is the best skew factor
/// for fixed R; with the restart safeguard the unweighted objective is
/// non-increasing along the history.
SolverResult solve_phdmd(const Matrix& Z, const Matrix& T, const Matrix& R0,
                         const SolverOptions& opts = {});
SolverResult solve_phdmd(const DataMatrices& data, const Matrix& R0,
                         const SolverOptions& opts = {});
/// Starts from the R factor of init_rank_deficient(Z, T).
SolverResult solve_phdmd(const DataMatrices& data, const SolverOptions& opts = {});

/// Q T T^T - Z2 T^T, the derivative of 1/2 ||Z2 - R T||_F^2 at R = Q.
Matrix grad_psd_part(const Matrix& Q, const Matrix& T, const Matrix& Z2);

/// ||dJ|| / ||J_next|| + ||dR|| / ||R_next||; a term with a zero denominator
/// contributes ||d|| (0 when the delta vanishes too).
double stopping_metric(const JRPair& prev, const JRPair& next);

/// Splits the block matrices of a fit on (Z, T) back into a pH system with
/// energy matrix data.H_reduced:
///   J_full = [[J, G], [-G^T, N]],  R_full = [[R, P], [P^T, S]].
PHSystem to_ph_system(const DataMatrices& data, const JRPair& pair);

}  // namespace phdmd
