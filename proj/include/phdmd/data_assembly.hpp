#pragma once

#include <optional>

#include "phdmd/simulate.hpp"

namespace phdmd {

/// Finite-difference derivative and consecutive-pair averages of a trajectory;
/// each matrix has one column per step (M columns for M+1 samples).
struct MidpointData {
  Matrix Xdot;  // (x_{i+1} - x_i) / dt
  Matrix X;     // (x_{i+1} + x_i) / 2
  Matrix U;     // (u_{i+1} + u_i) / 2
  Matrix Y;     // (y_{i+1} + y_i) / 2
  double dt = 0.0;
};

MidpointData midpoint_matrices(const Trajectory& traj);

/// Leading r left singular vectors of the snapshot matrix (no centering).
/// Throws if r exceeds the numerical rank of X.
Matrix pod_basis(const Matrix& X, Eigen::Index r, double truncation_tol = kDefaultTruncationTol);

/// Data pair (Z, T) for the fit Z ~ (J - R) T:
///   Z = [Phi^T H Phi Phi^T Xdot; -Y],  T = [Phi^T X; U].
struct DataMatrices {
  Matrix Z;
  Matrix T;
  std::optional<Matrix> phi;  // n x r with orthonormal columns
  Matrix H_reduced;           // Phi^T H Phi (H itself without reduction)
  Eigen::Index reduced_dim = 0;
  Eigen::Index port_dim = 0;
  double dt = 0.0;

  Eigen::Index total_dim() const { return reduced_dim + port_dim; }
};

/// Without phi the state is kept (Phi = I).
DataMatrices build_ZT(const Matrix& H, const MidpointData& data,
                      const std::optional<Matrix>& phi = std::nullopt);

/// Stacked snapshot matrices for DMD/OI-style least squares:
///   Z0 = [x_0 .. x_{M-1}; u_0 .. u_{M-1}]
///   Z1 = [dx_0 .. dx_{M-1}; y_0 .. y_{M-1}]
/// with dx_i = x_{i+1} (discrete) or (x_{i+1} - x_i) / dt (continuous).
struct SnapshotPair {
  Matrix Z0;
  Matrix Z1;
  Eigen::Index state_dim = 0;
  Eigen::Index input_dim = 0;
  Eigen::Index output_dim = 0;
  bool continuous = false;
  double dt = 0.0;
};

SnapshotPair dmd_snapshot_matrices(const Trajectory& traj, bool continuous);

/// Same stacking built from the midpoint averages, Z0 = [X; U], Z1 = [Xdot; Y],
/// optionally projected onto a reduced basis.
SnapshotPair midpoint_snapshot_matrices(const MidpointData& data,
                                        const std::optional<Matrix>& phi = std::nullopt);

}  // namespace phdmd
