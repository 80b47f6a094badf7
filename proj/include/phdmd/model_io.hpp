#pragma once

#include <filesystem>
#include <optional>

#include "phdmd/ph_model.hpp"

namespace phdmd {

/// Dense Matrix Market "array real general" files, column-major, values
/// written with 17 significant digits so a save/load cycle is exact.
void write_matrix_market(const std::filesystem::path& path, const Matrix& a);
Matrix read_matrix_market(const std::filesystem::path& path);

enum class ModelKind { PortHamiltonian, StateSpace };

/// A model directory holds one .mtx file per block plus manifest.json mapping
/// block names to file paths (relative to the manifest). pH manifests carry
/// H, J, R, G and optionally P, S, N; state-space manifests carry A, B, C, D.
/// Either kind may carry a "basis" entry (n x r projection used to reduce the
/// state).
struct ModelFiles {
  ModelKind kind = ModelKind::PortHamiltonian;
  std::optional<PHSystem> ph;
  std::optional<LTISystem> lti;
  std::optional<Matrix> basis;
};

/// Writes dir/manifest.json and the block files. Creates dir if needed.
void save_system(const PHSystem& sys, const std::filesystem::path& dir,
                 const std::optional<Matrix>& basis = std::nullopt);
void save_lti(const LTISystem& sys, const std::filesystem::path& dir,
              const std::optional<Matrix>& basis = std::nullopt);

/// `path` is either a manifest file or a directory containing manifest.json.
/// pH systems are validated; a structurally invalid system is rejected with
/// ErrorKind::Structure and the list of violations.
ModelFiles load_model(const std::filesystem::path& path);
PHSystem load_system(const std::filesystem::path& path);

}  // namespace phdmd
