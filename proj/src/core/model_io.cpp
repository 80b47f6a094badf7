#include "phdmd/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "parse_number.hpp"
#include "phdmd/error.hpp"

namespace phdmd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

fs::path manifest_path_of(const fs::path& path) {
  if (fs::is_directory(path)) return path / "manifest.json";
  return path;
}

json read_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) fail(ErrorKind::Io, "cannot open model manifest '" + manifest.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::Io, "malformed model manifest '" + manifest.string() + "': " + e.what());
  }
}

Matrix block_from(const json& manifest, const fs::path& base, const char* name,
                  const fs::path& manifest_file) {
  if (!manifest.contains(name) || !manifest[name].is_string()) {
    fail(ErrorKind::Io, "model manifest '" + manifest_file.string() + "' has no entry for block " +
                            name);
  }
  return read_matrix_market(base / manifest[name].get<std::string>());
}

void write_manifest(const fs::path& dir, const json& manifest) {
  std::ofstream out(dir / "manifest.json");
  if (!out) fail(ErrorKind::Io, "cannot write manifest in '" + dir.string() + "'");
  out << manifest.dump(2) << '\n';
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

}  // namespace

void write_matrix_market(const fs::path& path, const Matrix& a) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << ' ' << a.cols() << '\n';
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) out << format_double(a(i, j)) << '\n';
  }
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

Matrix read_matrix_market(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open matrix file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Io, "empty matrix file '" + path.string() + "'");

  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || object != "matrix" || format != "array" || field != "real" ||
      symmetry != "general") {
    fail(ErrorKind::Io, "'" + path.string() +
                            "' is not a dense Matrix Market file (expected "
                            "'%%MatrixMarket matrix array real general')");
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  long rows = -1, cols = -1;
  {
    std::istringstream dims(line);
    if (!(dims >> rows >> cols) || rows < 0 || cols < 0) {
      fail(ErrorKind::Io, "'" + path.string() + "': bad size line '" + line + "'");
    }
  }
  Matrix a(rows, cols);
  for (long j = 0; j < cols; ++j) {
    for (long i = 0; i < rows; ++i) {
      std::string tok;
      if (!(in >> tok)) {
        fail(ErrorKind::Io, "'" + path.string() + "': expected " + std::to_string(rows * cols) +
                                " values, found " + std::to_string(j * rows + i));
      }
      const auto v = detail::parse_double(tok);
      if (!v) fail(ErrorKind::Io, "'" + path.string() + "': cannot parse value '" + tok + "'");
      a(i, j) = *v;
    }
  }
  return a;
}

void save_system(const PHSystem& sys, const fs::path& dir, const std::optional<Matrix>& basis) {
  prepare_dir(dir);
  json manifest;
  manifest["kind"] = "ph";
  manifest["state_dim"] = sys.state_dim();
  manifest["port_dim"] = sys.port_dim();
  const std::pair<const Matrix*, const char*> blocks[] = {
      {&sys.H, "H"}, {&sys.J, "J"}, {&sys.R, "R"}, {&sys.G, "G"},
      {&sys.P, "P"}, {&sys.S, "S"}, {&sys.N, "N"}};
  for (const auto& [a, name] : blocks) {
    const std::string file = std::string(name) + ".mtx";
    write_matrix_market(dir / file, *a);
    manifest[name] = file;
  }
  if (basis) {
    write_matrix_market(dir / "basis.mtx", *basis);
    manifest["basis"] = "basis.mtx";
  }
  write_manifest(dir, manifest);
}

void save_lti(const LTISystem& sys, const fs::path& dir, const std::optional<Matrix>& basis) {
  prepare_dir(dir);
  json manifest;
  manifest["kind"] = "lti";
  manifest["time"] = sys.discrete ? "discrete" : "continuous";
  if (sys.discrete) manifest["dt"] = sys.dt;
  const std::pair<const Matrix*, const char*> blocks[] = {
      {&sys.A, "A"}, {&sys.B, "B"}, {&sys.C, "C"}, {&sys.D, "D"}};
  for (const auto& [a, name] : blocks) {
    const std::string file = std::string(name) + ".mtx";
    write_matrix_market(dir / file, *a);
    manifest[name] = file;
  }
  if (basis) {
    write_matrix_market(dir / "basis.mtx", *basis);
    manifest["basis"] = "basis.mtx";
  }
  write_manifest(dir, manifest);
}

ModelFiles load_model(const fs::path& path) {
  const fs::path manifest_file = manifest_path_of(path);
  const json manifest = read_manifest(manifest_file);
  if (!manifest.is_object()) {
    fail(ErrorKind::Io, "model manifest '" + manifest_file.string() + "' is not a JSON object");
  }
  const fs::path base = manifest_file.parent_path();
  const std::string kind = manifest.value("kind", std::string("ph"));

  ModelFiles files;
  if (kind == "ph") {
    files.kind = ModelKind::PortHamiltonian;
    PHSystem sys = make_ph_system(block_from(manifest, base, "H", manifest_file),
                                  block_from(manifest, base, "J", manifest_file),
                                  block_from(manifest, base, "R", manifest_file),
                                  block_from(manifest, base, "G", manifest_file));
    if (manifest.contains("P")) sys.P = block_from(manifest, base, "P", manifest_file);
    if (manifest.contains("S")) sys.S = block_from(manifest, base, "S", manifest_file);
    if (manifest.contains("N")) sys.N = block_from(manifest, base, "N", manifest_file);
    const auto issues = validate(sys);
    if (!issues.empty()) {
      std::string msg = "model '" + manifest_file.string() + "' is not a valid pH system:";
      for (const auto& issue : issues) msg += "\n  - " + issue;
      fail(ErrorKind::Structure, msg);
    }
    files.ph = std::move(sys);
  } else if (kind == "lti") {
    files.kind = ModelKind::StateSpace;
    LTISystem sys;
    sys.A = block_from(manifest, base, "A", manifest_file);
    sys.B = block_from(manifest, base, "B", manifest_file);
    sys.C = block_from(manifest, base, "C", manifest_file);
    sys.D = block_from(manifest, base, "D", manifest_file);
    sys.discrete = manifest.value("time", std::string("continuous")) == "discrete";
    sys.dt = manifest.value("dt", 0.0);
    const auto n = sys.A.rows();
    if (sys.A.cols() != n || sys.B.rows() != n || sys.C.cols() != n ||
        sys.D.rows() != sys.C.rows() || sys.D.cols() != sys.B.cols()) {
      fail(ErrorKind::Structure,
           "model '" + manifest_file.string() + "': A, B, C, D blocks are not conformable");
    }
    files.lti = std::move(sys);
  } else {
    fail(ErrorKind::Io, "model manifest '" + manifest_file.string() + "' has unknown kind '" +
                            kind + "'");
  }
  if (manifest.contains("basis")) files.basis = block_from(manifest, base, "basis", manifest_file);
  return files;
}

PHSystem load_system(const fs::path& path) {
  ModelFiles files = load_model(path);
  if (!files.ph) {
    fail(ErrorKind::Io, "'" + path.string() + "' holds a state-space model, not a pH system");
  }
  return std::move(*files.ph);
}

}  // namespace phdmd
