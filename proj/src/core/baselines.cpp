#include "phdmd/baselines.hpp"

#include <string>

#include "phdmd/error.hpp"

namespace phdmd {

LTISystem dmd_fit(const SnapshotPair& snapshots, double truncation_tol) {
  const auto n = snapshots.state_dim;
  const auto m = snapshots.input_dim;
  const auto p = snapshots.output_dim;
  require(snapshots.Z0.cols() > 0, "dmd_fit: no snapshots");
  require(snapshots.Z0.rows() == n + m && snapshots.Z1.rows() == n + p &&
              snapshots.Z1.cols() == snapshots.Z0.cols(),
          "dmd_fit: snapshot stacks are not conformable");

  const Matrix op = snapshots.Z1 * linalg::pinv(snapshots.Z0, truncation_tol);
  LTISystem out;
  out.A = op.topLeftCorner(n, n);
  out.B = op.topRightCorner(n, m);
  out.C = op.bottomLeftCorner(p, n);
  out.D = op.bottomRightCorner(p, m);
  out.discrete = !snapshots.continuous;
  out.dt = out.discrete ? snapshots.dt : 0.0;
  return out;
}

LTISystem oi_fit(const MidpointData& data, const std::optional<Matrix>& phi,
                 double truncation_tol) {
  return dmd_fit(midpoint_snapshot_matrices(data, phi), truncation_tol);
}

}  // namespace phdmd
