#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "fracsync/cli/commands.hpp"
#include "fracsync/cli/config.hpp"
#include "fracsync/cli/csv.hpp"

using namespace fracsync;
using namespace fracsync::cli;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "fracsync");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path(FRACSYNC_TEST_TMP) / "cli" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> result;
  for (std::string line; std::getline(in, line);) result.push_back(line);
  return result;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  fs::create_directories(dir.parent_path());
  const fs::path path = dir.string() + ".json";
  std::ofstream(path) << body;
  return path;
}

nlohmann::json read_report(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "report.json")); }

}  // namespace

TEST_CASE("config rejected before anything is written") {
  struct Case {
    std::vector<std::string> args;
    std::string body;
    std::string field;
  };
  const std::vector<Case> cases = {
      {{"simulate", "--orders", "1.5"}, "", "orders"},
      {{"simulate", "--orders", "0"}, "", "orders"},
      {{"simulate", "--h", "-0.1"}, "", "h"},
      {{"simulate", "--memory", "last:0"}, "", "memory"},
      {{"synchronize", "--mode", "bogus"}, "", "mode"},
      {{"convergence", "--problem", "cubic"}, "", "problem"},
      {{"simulate"}, R"({"unknown_key": 1})", "unknown_key"},
      {{"simulate"}, R"({"solver": {"h": 0}})", "h"},
      {{"synchronize"}, R"({"controller": {"mode": "literal", "lambda": [-1, -1, -1]}})", "lambda"},
      {{"synchronize"}, R"({"controller": {"lambda": [-1, 0.5, -1]}})", "lambda"},
      {{"synchronize"}, R"({"controller": {"mode": "exact", "gain": [[0,0,0],[0,0,0],[0,0,0]]}})", "gain"},
      {{"stability"}, R"({"stability": {"source": "matrix"}})", "matrix"},
      {{"simulate"}, R"({"solver": {"h": )", "config"},
  };
  int index = 0;
  for (const auto& c : cases) {
    CAPTURE(index);
    const fs::path dir = fresh_dir("reject_" + std::to_string(index++));
    std::vector<std::string> args = c.args;
    if (!c.body.empty()) {
      args.push_back("--config");
      args.push_back(write_config(dir, c.body).string());
    }
    args.push_back("--out");
    args.push_back(dir.string());
    const RunResult r = run(args);
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find(c.field) != std::string::npos);
    CHECK_FALSE(fs::exists(dir));
  }
}

TEST_CASE("missing config file") {
  const fs::path dir = fresh_dir("missing_config");
  const RunResult r = run({"simulate", "--config", (dir / "nope.json").string(), "--out", dir.string()});
  CHECK(r.code == kExitConfig);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("simulate writes header, initial row and every step") {
  const fs::path dir = fresh_dir("simulate");
  const RunResult r = run({"simulate", "--t-end", "1", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  const auto rows = lines(dir / "trajectory.csv");
  REQUIRE(rows.size() == 2002);
  CHECK(rows[0] == "t,x,y,z");
  CHECK(rows[1] == "0,2,-1,1");
  CHECK(rows.back().rfind("1,", 0) == 0);

  const auto report = read_report(dir);
  CHECK(report["status"] == "ok");
  CHECK(report["config"]["solver"]["h"] == 0.0005);
  CHECK(fs::exists(dir / "report.timing.json"));
}

TEST_CASE("csv round-trips exactly") {
  const fs::path dir = fresh_dir("roundtrip");
  REQUIRE(run({"simulate", "--t-end", "0.5", "--out", dir.string()}).code == kExitOk);
  const CsvTable table = read_csv(dir / "trajectory.csv");
  const Trajectory traj = integrate(SystemDef::financial(FinancialParams{}), FractionalOrders(0.99), State3(2, -1, 1),
                                    SolverConfig::from_horizon(0.0005, 0.5));
  REQUIRE(table.rows.rows() == traj.size());
  CHECK(table.rows.col(0) == traj.times);
  CHECK(table.rows.rightCols(3).transpose() == traj.states);
}

TEST_CASE("zero system stays at its initial state") {
  const fs::path dir = fresh_dir("zero");
  const fs::path config = write_config(dir, R"({"system": "zero", "initial_state": [0.5, -3, 7]})");
  REQUIRE(run({"simulate", "--config", config.string(), "--t-end", "0.2", "--out", dir.string()}).code == kExitOk);
  const CsvTable table = read_csv(dir / "trajectory.csv");
  for (Eigen::Index i = 0; i < table.rows.rows(); ++i) {
    CHECK(table.rows(i, 1) == 0.5);
    CHECK(table.rows(i, 2) == -3.0);
    CHECK(table.rows(i, 3) == 7.0);
  }
}

TEST_CASE("reruns are byte-identical") {
  const fs::path a = fresh_dir("rerun_a");
  const fs::path b = fresh_dir("rerun_b");
  for (const auto& dir : {a, b}) {
    REQUIRE(run({"synchronize", "--t-end", "0.5", "--out", dir.string()}).code == kExitOk);
  }
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  // The report echoes out_dir, so compare everything else.
  auto ra = read_report(a), rb = read_report(b);
  ra["config"].erase("out_dir");
  rb["config"].erase("out_dir");
  CHECK(ra == rb);
}

TEST_CASE("synchronize columns and initial errors") {
  const fs::path dir = fresh_dir("sync");
  REQUIRE(run({"synchronize", "--t-end", "0.5", "--out", dir.string()}).code == kExitOk);
  const auto rows = lines(dir / "trajectory.csv");
  CHECK(rows[0] == "t,x1,y1,z1,x2,y2,z2,e1,e2,e3,u1,u2,u3");
  CHECK(rows[1].rfind("0,2,-1,1,8,2,3,6,3,2,", 0) == 0);

  const auto report = read_report(dir);
  REQUIRE(report["runs"].size() == 1);
  const auto& run0 = report["runs"][0];
  CHECK(run0["initial_errors"] == nlohmann::json::array({6.0, 3.0, 2.0}));
  CHECK(run0["stability"]["satisfied_all"] == true);
  for (const auto& lambda : report["closed_loop_matrix"][0]) CHECK(lambda.is_number());
}

TEST_CASE("identical initial states stay synchronized") {
  const fs::path dir = fresh_dir("same_ic");
  const fs::path config =
      write_config(dir, R"({"master_initial": [2, -1, 1], "slave_initial": [2, -1, 1]})");
  REQUIRE(run({"synchronize", "--config", config.string(), "--t-end", "0.5", "--out", dir.string()}).code ==
          kExitOk);
  const CsvTable table = read_csv(dir / "trajectory.csv");
  CHECK(table.rows.middleCols(7, 3).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("order sweep writes one file per order") {
  const fs::path dir = fresh_dir("sweep");
  const fs::path config = write_config(dir, R"({"order_sweep": [0.99, 0.98]})");
  REQUIRE(run({"synchronize", "--config", config.string(), "--t-end", "0.2", "--out", dir.string()}).code ==
          kExitOk);
  CHECK(fs::exists(dir / "trajectory_q0.99.csv"));
  CHECK(fs::exists(dir / "trajectory_q0.98.csv"));
  const auto report = read_report(dir);
  REQUIRE(report["runs"].size() == 2);
  CHECK(report["runs"][1]["orders"] == nlohmann::json::array({0.98, 0.98, 0.98}));
}

TEST_CASE("memory override is echoed") {
  const fs::path dir = fresh_dir("memory");
  REQUIRE(run({"simulate", "--t-end", "0.2", "--memory", "last:50", "--out", dir.string()}).code == kExitOk);
  CHECK(read_report(dir)["config"]["solver"]["memory"] == "last:50");
}

TEST_CASE("non-finite run exits 3 and keeps the good prefix") {
  const fs::path dir = fresh_dir("blowup");
  const fs::path config = write_config(dir, R"({"system": "volta", "initial_state": [1e200, 1e200, 1e200]})");
  const RunResult r = run({"simulate", "--config", config.string(), "--t-end", "1", "--out", dir.string()});
  CHECK(r.code == kExitNonFinite);
  const auto report = read_report(dir);
  CHECK(report["status"] == "non_finite");
  CHECK(report["failure_step"].is_number_integer());
  CHECK(lines(dir / "trajectory.csv").size() >= 2);
}

TEST_CASE("stability sources") {
  SUBCASE("closed loop") {
    const fs::path dir = fresh_dir("stab_loop");
    REQUIRE(run({"stability", "--out", dir.string()}).code == kExitOk);
    const auto report = read_report(dir);
    for (const auto& lambda : report["stability"]["eigenvalues"]) {
      CHECK(lambda["re"].get<double>() == doctest::Approx(-1.0).epsilon(1e-12));
      CHECK(std::abs(lambda["im"].get<double>()) <= 1e-12);
    }
    CHECK(report["stability"]["satisfied_all"] == true);
  }
  SUBCASE("financial equilibrium") {
    const fs::path dir = fresh_dir("stab_eq");
    const fs::path config = write_config(dir, R"({"stability": {"source": "financial_equilibrium"}})");
    REQUIRE(run({"stability", "--config", config.string(), "--out", dir.string()}).code == kExitOk);
    const auto report = read_report(dir);
    const double q_star = report["chaos_threshold"].get<double>();
    CHECK(q_star == doctest::Approx(0.853648).epsilon(1e-5));
    CHECK(report["reference_threshold"]["agrees"] == true);
  }
  SUBCASE("identity matrix is never stable") {
    const fs::path dir = fresh_dir("stab_identity");
    const fs::path config =
        write_config(dir, R"({"stability": {"source": "matrix", "matrix": [[1,0,0],[0,1,0],[0,0,1]]}})");
    REQUIRE(run({"stability", "--config", config.string(), "--out", dir.string()}).code == kExitOk);
    const auto report = read_report(dir);
    CHECK(report["chaos_threshold"].get<double>() == 0.0);
    CHECK(report["stability"]["satisfied_all"] == false);
  }
}

TEST_CASE("convergence exit code follows the band verdict") {
  for (const std::string problem : {"quartic", "coupled"}) {
    CAPTURE(problem);
    const fs::path dir = fresh_dir("convergence_" + problem);
    const RunResult r = run({"convergence", "--problem", problem, "--out", dir.string()});
    const auto report = read_report(dir);
    CHECK(r.code == (report["all_in_band"].get<bool>() ? kExitOk : kExitBandFailure));
    CHECK(report["cases"].size() == 3);
  }
}

TEST_CASE("help exits cleanly") {
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"simulate", "--help"}).code == kExitOk);
  CHECK(run({}).code == kExitConfig);
}
