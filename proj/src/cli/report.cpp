#include "fracsync/cli/report.hpp"

#include <fstream>
#include <stdexcept>

namespace fracsync::cli {

using nlohmann::ordered_json;

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ordered_json matrix_json(const Matrix3<double>& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

ordered_json to_json(const StabilityReport& report) {
  ordered_json j;
  ordered_json eig = ordered_json::array();
  for (const auto& lambda : report.eigenvalues) eig.push_back({{"re", lambda.real()}, {"im", lambda.imag()}});
  j["eigenvalues"] = eig;
  j["min_arg"] = report.min_arg;
  j["thresholds"] = report.thresholds;
  j["satisfied"] = report.satisfied;
  j["satisfied_all"] = report.satisfied_all;
  j["degenerate"] = report.degenerate;
  j["note"] = report.note;
  return j;
}

ordered_json to_json(const SyncSummary& summary) {
  ordered_json j;
  j["tol"] = summary.tol;
  j["sync_time"] = summary.sync_time ? ordered_json(*summary.sync_time) : ordered_json(nullptr);
  j["final_errors"] = vector_json(summary.final_errors);
  const double worst = summary.final_errors.cwiseAbs().maxCoeff();
  j["final_max_error"] = worst;
  j["final_below_tol"] = worst < summary.tol;
  return j;
}

ordered_json to_json(const ConvergenceReport& report) {
  ordered_json j;
  j["step_sizes"] = report.step_sizes;
  j["errors"] = report.errors;
  j["orders"] = report.orders;
  return j;
}

void write_json(const std::filesystem::path& path, const ordered_json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace fracsync::cli
