#include "fracsync/cli/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracsync::cli {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf.data(), ptr);
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                          const Trajectory& traj) {
  const Eigen::Index cols = 1 + traj.states.rows() + (traj.has_errors() ? traj.errors.rows() + traj.controls.rows() : 0);
  if (static_cast<Eigen::Index>(header.size()) != cols) {
    throw std::invalid_argument("CSV header does not match trajectory columns");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());

  std::string line;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) line += ',';
    line += header[c];
  }
  out << line << '\n';

  auto append_column = [&line](const Eigen::MatrixXd& m, Eigen::Index j) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      line += ',';
      line += format_double(m(r, j));
    }
  };
  for (Eigen::Index j = 0; j < traj.size(); ++j) {
    line = format_double(traj.times(j));
    append_column(traj.states, j);
    if (traj.has_errors()) {
      append_column(traj.errors, j);
      append_column(traj.controls, j);
    }
    out << line << '\n';
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = std::min(line.find(',', start), line.size());
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + comma, v);
      if (ec != std::errc() || ptr != line.data() + comma) throw std::runtime_error("bad CSV cell in " + path.string());
      row.push_back(v);
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  table.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != table.header.size()) throw std::runtime_error("ragged CSV row in " + path.string());
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return table;
}

}  // namespace fracsync::cli
