#pragma once

#include "phdmd/data_assembly.hpp"

namespace phdmd {

/// Unconstrained least-squares fit Z1 ~ [[A, B], [C, D]] Z0 through the
/// truncated pseudoinverse of Z0 (minimum-norm solution). The result is a
/// discrete model for discrete snapshot pairs and a continuous one otherwise.
LTISystem dmd_fit(const SnapshotPair& snapshots, double truncation_tol = kDefaultTruncationTol);

/// Operator inference on the midpoint stacks [X; U] -> [Xdot; Y], optionally
/// in the coordinates of a reduced basis. Always continuous-time.
LTISystem oi_fit(const MidpointData& data, const std::optional<Matrix>& phi = std::nullopt,
                 double truncation_tol = kDefaultTruncationTol);

}  // namespace phdmd
