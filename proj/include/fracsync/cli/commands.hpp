#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fracsync/cli/config.hpp"

namespace fracsync::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNonFinite = 3;
inline constexpr int kExitBandFailure = 4;

/// Reference chaos-onset order for the financial system.
inline constexpr double kReferenceChaosThreshold = 0.8436;
inline constexpr double kReferenceThresholdTolerance = 0.02;

struct CommandResult {
  int exit_code{kExitOk};
  nlohmann::ordered_json report;
};

// Each command assumes a validated config and writes its files under
// config.out_dir. Wall-clock time goes to a separate *.timing.json so the
// report itself depends only on the inputs.
CommandResult cmd_simulate(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_synchronize(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_stability(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_convergence(const ExperimentConfig& config, std::ostream& log);

/// Matrix analysed by the stability command.
[[nodiscard]] Matrix3<double> stability_matrix(const ExperimentConfig& config);

/// Full command line (args[0] is the program name). Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracsync::cli
