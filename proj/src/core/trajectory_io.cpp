#include "phdmd/trajectory_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "parse_number.hpp"
#include "phdmd/error.hpp"

namespace phdmd {

namespace fs = std::filesystem;

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  out.append(buf, static_cast<std::size_t>(len));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Length of the run `prefix_1, prefix_2, ...` starting at column `start`.
Eigen::Index group_size(const std::vector<std::string>& header, std::size_t start,
                        const std::string& prefix) {
  Eigen::Index count = 0;
  for (std::size_t c = start; c < header.size(); ++c) {
    if (header[c] != prefix + "_" + std::to_string(count + 1)) break;
    ++count;
  }
  return count;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  check_trajectory(traj);
  std::string out = "t";
  for (Eigen::Index i = 0; i < traj.U.rows(); ++i) out += ",u_" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < traj.X.rows(); ++i) out += ",x_" + std::to_string(i + 1);
  for (Eigen::Index i = 0; i < traj.Y.rows(); ++i) out += ",y_" + std::to_string(i + 1);
  out += '\n';
  for (Eigen::Index k = 0; k < traj.samples(); ++k) {
    append_double(out, traj.t[k]);
    for (const Matrix* block : {&traj.U, &traj.X, &traj.Y}) {
      for (Eigen::Index i = 0; i < block->rows(); ++i) {
        out += ',';
        append_double(out, (*block)(i, k));
      }
    }
    out += '\n';
  }
  return out;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj) {
  const std::string text = trajectory_csv(traj);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

Trajectory read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open trajectory file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Io, "'" + path.string() + "' is empty");

  const auto header = split_commas(line);
  if (header.empty() || header[0] != "t") {
    fail(ErrorKind::Io, "'" + path.string() + "': header must start with column 't'");
  }
  const Eigen::Index m = group_size(header, 1, "u");
  const Eigen::Index n = group_size(header, 1 + static_cast<std::size_t>(m), "x");
  const Eigen::Index p = group_size(header, 1 + static_cast<std::size_t>(m + n), "y");
  if (static_cast<std::size_t>(1 + m + n + p) != header.size()) {
    fail(ErrorKind::Io, "'" + path.string() +
                            "': header must be t,u_1..u_m,x_1..x_n,y_1..y_p; column " +
                            std::to_string(1 + m + n + p + 1) + " ('" +
                            header[static_cast<std::size_t>(1 + m + n + p)] +
                            "') does not fit that layout");
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      fail(ErrorKind::Io, "'" + path.string() + "' line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " values, found " +
                              std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = detail::parse_double(cells[c]);
      if (!v) {
        fail(ErrorKind::Io, "'" + path.string() + "' line " + std::to_string(line_no) +
                                ", column '" + header[c] + "': cannot parse '" + cells[c] + "'");
      }
      row[c] = *v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::Io, "'" + path.string() + "' has no data rows");

  const auto samples = static_cast<Eigen::Index>(rows.size());
  Trajectory traj;
  traj.t.resize(samples);
  traj.U.resize(m, samples);
  traj.X.resize(n, samples);
  traj.Y.resize(p, samples);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const auto& row = rows[static_cast<std::size_t>(k)];
    traj.t[k] = row[0];
    for (Eigen::Index i = 0; i < m; ++i) traj.U(i, k) = row[static_cast<std::size_t>(1 + i)];
    for (Eigen::Index i = 0; i < n; ++i) traj.X(i, k) = row[static_cast<std::size_t>(1 + m + i)];
    for (Eigen::Index i = 0; i < p; ++i) {
      traj.Y(i, k) = row[static_cast<std::size_t>(1 + m + n + i)];
    }
  }
  traj.dt = samples > 1 ? traj.t[1] - traj.t[0] : 0.0;
  try {
    check_trajectory(traj);
  } catch (const Error& e) {
    fail(ErrorKind::Io, "'" + path.string() + "': " + e.what());
  }
  return traj;
}

}  // namespace phdmd
