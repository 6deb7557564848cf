#pragma once

#include <filesystem>

#include "json.hpp"

#include "fracsync/analysis.hpp"
#include "fracsync/control.hpp"

namespace fracsync::cli {

[[nodiscard]] nlohmann::ordered_json to_json(const StabilityReport& report);
[[nodiscard]] nlohmann::ordered_json to_json(const SyncSummary& summary);
[[nodiscard]] nlohmann::ordered_json to_json(const ConvergenceReport& report);
[[nodiscard]] nlohmann::ordered_json vector_json(const Eigen::VectorXd& v);
[[nodiscard]] nlohmann::ordered_json matrix_json(const Matrix3<double>& m);

/// Two-space indented JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

}  // namespace fracsync::cli
