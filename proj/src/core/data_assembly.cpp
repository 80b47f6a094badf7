#include "phdmd/data_assembly.hpp"

#include <algorithm>
#include <string>

#include "phdmd/error.hpp"

namespace phdmd {

MidpointData midpoint_matrices(const Trajectory& traj) {
  check_trajectory(traj);
  const auto samples = traj.samples();
  require(samples >= 2, "midpoint_matrices: need at least 2 samples, got " +
                            std::to_string(samples));
  const auto steps = samples - 1;
  MidpointData d;
  d.dt = traj.dt;
  d.Xdot = (traj.X.rightCols(steps) - traj.X.leftCols(steps)) / traj.dt;
  d.X = 0.5 * (traj.X.rightCols(steps) + traj.X.leftCols(steps));
  d.U = 0.5 * (traj.U.rightCols(steps) + traj.U.leftCols(steps));
  d.Y = 0.5 * (traj.Y.rightCols(steps) + traj.Y.leftCols(steps));
  return d;
}

Matrix pod_basis(const Matrix& X, Eigen::Index r, double truncation_tol) {
  require(r >= 1, "pod_basis: r must be at least 1");
  const auto svd = linalg::skinny_svd(X, truncation_tol);
  if (r > svd.rank) {
    fail(ErrorKind::InvalidArgument, "pod_basis: requested r=" + std::to_string(r) +
                                         " exceeds the numerical rank " +
                                         std::to_string(svd.rank) + " of the state snapshots");
  }
  return svd.U.leftCols(r);
}

DataMatrices build_ZT(const Matrix& H, const MidpointData& data, const std::optional<Matrix>& phi) {
  const auto n = data.X.rows();
  const auto m = data.U.rows();
  const auto cols = data.X.cols();
  require(H.rows() == n && H.cols() == n, "build_ZT: H must be " + std::to_string(n) + "x" +
                                              std::to_string(n) + " to match the state data");
  require(data.Xdot.rows() == n && data.Xdot.cols() == cols && data.U.cols() == cols &&
              data.Y.cols() == cols,
          "build_ZT: snapshot matrices have inconsistent column counts");
  require(data.Y.rows() == m, "build_ZT: pH data needs as many outputs as inputs");
  if (n > 0 && (linalg::symmetry_defect(H) > 1e-10 * std::max(1.0, H.cwiseAbs().maxCoeff()) ||
                Eigen::LLT<Matrix>(linalg::sym(H)).info() != Eigen::Success)) {
    fail(ErrorKind::InvalidArgument, "build_ZT: H is not symmetric positive definite");
  }

  DataMatrices out;
  out.dt = data.dt;
  out.port_dim = m;
  Matrix x_red, xdot_energy;
  if (phi) {
    require(phi->rows() == n, "build_ZT: basis has " + std::to_string(phi->rows()) +
                                  " rows, state dimension is " + std::to_string(n));
    const Matrix gram = phi->transpose() * *phi;
    if ((gram - Matrix::Identity(phi->cols(), phi->cols())).norm() > 1e-10) {
      fail(ErrorKind::InvalidArgument, "build_ZT: basis columns are not orthonormal");
    }
    out.phi = *phi;
    out.H_reduced = phi->transpose() * H * *phi;
    x_red = phi->transpose() * data.X;
    xdot_energy = out.H_reduced * (phi->transpose() * data.Xdot);
  } else {
    out.H_reduced = H;
    x_red = data.X;
    xdot_energy = H * data.Xdot;
  }
  out.reduced_dim = x_red.rows();

  out.Z.resize(out.reduced_dim + m, cols);
  out.Z << xdot_energy, -data.Y;
  out.T.resize(out.reduced_dim + m, cols);
  out.T << x_red, data.U;
  return out;
}

SnapshotPair dmd_snapshot_matrices(const Trajectory& traj, bool continuous) {
  check_trajectory(traj);
  const auto samples = traj.samples();
  require(samples >= 2, "dmd_snapshot_matrices: need at least 2 samples, got " +
                            std::to_string(samples));
  const auto steps = samples - 1;
  const auto n = traj.X.rows();
  const auto m = traj.U.rows();
  const auto p = traj.Y.rows();

  SnapshotPair out;
  out.state_dim = n;
  out.input_dim = m;
  out.output_dim = p;
  out.continuous = continuous;
  out.dt = traj.dt;
  out.Z0.resize(n + m, steps);
  out.Z0 << traj.X.leftCols(steps), traj.U.leftCols(steps);
  out.Z1.resize(n + p, steps);
  if (continuous) {
    out.Z1 << (traj.X.rightCols(steps) - traj.X.leftCols(steps)) / traj.dt, traj.Y.leftCols(steps);
  } else {
    out.Z1 << traj.X.rightCols(steps), traj.Y.leftCols(steps);
  }
  return out;
}

SnapshotPair midpoint_snapshot_matrices(const MidpointData& data, const std::optional<Matrix>& phi) {
  const Matrix x = phi ? Matrix(phi->transpose() * data.X) : data.X;
  const Matrix xdot = phi ? Matrix(phi->transpose() * data.Xdot) : data.Xdot;
  SnapshotPair out;
  out.state_dim = x.rows();
  out.input_dim = data.U.rows();
  out.output_dim = data.Y.rows();
  out.continuous = true;
  out.dt = data.dt;
  out.Z0.resize(x.rows() + data.U.rows(), x.cols());
  out.Z0 << x, data.U;
  out.Z1.resize(x.rows() + data.Y.rows(), x.cols());
  out.Z1 << xdot, data.Y;
  return out;
}

}  // namespace phdmd
