#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fracsync/control.hpp"
#include "fracsync/core.hpp"
#include "fracsync/solver.hpp"
#include "json.hpp"

namespace fracsync::cli {

/// Rejected configuration. `field()` names the offending setting.
class ConfigError : public Error {
public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const { return field_; }

private:
  std::string field_;
};

enum class Command { Simulate, Synchronize, Stability, Convergence };

[[nodiscard]] std::string_view to_string(Command command);

enum class StabilitySourceKind { ClosedLoop, FinancialEquilibrium, FinancialJacobian, VoltaJacobian, Matrix };

[[nodiscard]] std::string_view to_string(StabilitySourceKind kind);

struct StabilitySource {
  StabilitySourceKind kind{StabilitySourceKind::ClosedLoop};
  /// Index into financial_equilibria (0: x = 0 branch, 1: +x, 2: -x).
  int equilibrium_index{1};
  std::optional<State3> state;
  std::optional<Matrix3<double>> matrix;
};

/// Settings for every subcommand. Defaults reproduce the reference
/// experiment: financial (1, 0.1, 1) driving Volta (19, 11, 0.73) from
/// (2, -1, 1) and (8, 2, 3) at q = 0.99, h = 0.0005, lambda = -1, tol = 1e-3.
struct ExperimentConfig {
  Command command{Command::Synchronize};

  SystemKind system{SystemKind::Financial};
  FinancialParams financial{};
  VoltaParams volta{};
  std::array<double, 3> orders{0.99, 0.99, 0.99};
  /// Extra commensurate orders for side-by-side synchronization runs.
  std::vector<double> order_sweep;

  std::optional<State3> initial_state;
  State3 master_initial{2.0, -1.0, 1.0};
  State3 slave_initial{8.0, 2.0, 3.0};

  double h{0.0005};
  std::optional<double> t_end;
  MemoryWindow memory{FullHistory{}};

  ControllerMode mode{ControllerMode::ExactCancellation};
  std::optional<GainMatrix> gain;
  std::optional<State3> lambda;
  double sync_tol{1e-3};

  StabilitySource stability{};

  /// Convergence self-test problem: "quartic" (y-independent forcing) or "coupled".
  std::string convergence_problem{"quartic"};

  std::string out_dir{"."};
  std::string csv_name{"trajectory.csv"};
  std::string report_name{"report.json"};

  [[nodiscard]] double resolved_t_end() const;
  [[nodiscard]] State3 resolved_initial_state() const;
  [[nodiscard]] GainMatrix resolved_gain() const;
  [[nodiscard]] State3 resolved_lambda() const;
  [[nodiscard]] SolverConfig solver_config() const;
  [[nodiscard]] SyncExperiment experiment() const;

  /// Throws ConfigError on the first out-of-domain field.
  void validate() const;
};

/// Command-line overrides applied on top of a config file.
struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<double> h;
  std::optional<double> t_end;
  std::optional<std::string> orders;
  std::optional<std::string> mode;
  std::optional<std::string> memory;
  std::optional<std::string> problem;
};

/// Populate from a JSON document. Unknown keys are rejected.
[[nodiscard]] ExperimentConfig parse_config(Command command, const nlohmann::json& doc);

[[nodiscard]] ExperimentConfig load_config(Command command, const std::optional<std::string>& path,
                                           const Overrides& overrides);

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

[[nodiscard]] MemoryWindow parse_memory(const std::string& text);
[[nodiscard]] std::string format_memory(const MemoryWindow& memory);
[[nodiscard]] std::array<double, 3> parse_orders(const std::string& text);

/// Fully resolved config, used as the echo in every report.
[[nodiscard]] nlohmann::ordered_json to_json(const ExperimentConfig& config);

}  // namespace fracsync::cli
