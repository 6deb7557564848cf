#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracsync/solver.hpp"

namespace fracsync::cli {

/// Shortest decimal that parses back to exactly `x`.
[[nodiscard]] std::string format_double(double x);

/// Columns: t, every state row, then error and control rows when present.
void write_trajectory_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                          const Trajectory& traj);

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd rows;
};

[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

}  // namespace fracsync::cli
