#pragma once

#include "phdmd/linalg.hpp"

namespace phdmd {

/// Skew-symmetric / symmetric PSD pair fitted to Z ~ (J - R) T.
struct JRPair {
  Matrix J;
  Matrix R;
};

/// Best fit of a square Z by J - R in the Frobenius norm:
/// J = skew(Z), R = psd_project(-Z).
JRPair split_skew_psd(const Matrix& Z);

/// Solver for min ||Z1 - J T||_F over skew-symmetric J that factors T once.
///
/// With T = V1 S W1^T (skinny SVD), the range block of V^T J V solves the
/// Hadamard system K_ij (s_i^2 + s_j^2) = 2 skew(V1^T Z1 W1 S)_ij, the
/// coupling block between range(T) and its complement is matched exactly by
/// (I - V1 V1^T) Z1 W1 S^-1, and the block acting only on the complement of
/// range(T) is set to zero, which gives the minimum-norm solution.
class SkewProcrustes {
 public:
  explicit SkewProcrustes(const Matrix& T, double truncation_tol = kDefaultTruncationTol);

  Matrix solve(const Matrix& Z1) const;

  /// Same as solve() when the caller already holds Z1 * W1 (size n x rank).
  Matrix solve_projected(const Matrix& z1_w1) const;

  const linalg::SkinnySVD& svd() const { return svd_; }
  Eigen::Index rank() const { return svd_.rank; }

 private:
  Eigen::Index dim_ = 0;
  linalg::SkinnySVD svd_;
  Matrix hadamard_;  // 1 / (s_i^2 + s_j^2)
};

Matrix solve_skew_procrustes(const Matrix& Z1, const Matrix& T,
                             double truncation_tol = kDefaultTruncationTol);

/// Minimum-norm minimizers of the T^T-weighted problem
///   min ||T^T (Z - (J - R) T)||_F,  J = -J^T, R PSD,
/// built in the coordinates of the skinny SVD of T. Both factors vanish on the
/// orthogonal complement of range(T).
JRPair weighted_minimizers(const Matrix& Z, const Matrix& T,
                           double truncation_tol = kDefaultTruncationTol);

/// The two contributions to the optimal weighted residual: the part of the
/// data no linear map can reach (columns outside range(T^T)) and the positive
/// eigenvalues of the symmetric part that a PSD R cannot absorb.
struct WeightedOptimum {
  double unreachable = 0.0;   // ||Z~2||_F
  double lambda_plus = 0.0;   // ||Lambda_+||_F
  double value() const;       // sqrt(unreachable^2 + lambda_plus^2)
};

WeightedOptimum weighted_optimum(const Matrix& Z, const Matrix& T,
                                 double truncation_tol = kDefaultTruncationTol);

/// weighted_minimizers() plus the coupling block of J between the complement
/// of range(T) and range(T), chosen to reproduce the data exactly there
/// (R keeps no coupling). Identical to weighted_minimizers() when T has full
/// row rank.
JRPair init_rank_deficient(const Matrix& Z, const Matrix& T,
                           double truncation_tol = kDefaultTruncationTol);

}  // namespace phdmd
