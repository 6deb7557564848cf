#include "fracsync/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fracsync::cli {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Command command) {
  switch (command) {
    case Command::Simulate: return "simulate";
    case Command::Synchronize: return "synchronize";
    case Command::Stability: return "stability";
    case Command::Convergence: return "convergence";
  }
  return "unknown";
}

std::string_view to_string(StabilitySourceKind kind) {
  switch (kind) {
    case StabilitySourceKind::ClosedLoop: return "closed_loop";
    case StabilitySourceKind::FinancialEquilibrium: return "financial_equilibrium";
    case StabilitySourceKind::FinancialJacobian: return "financial_jacobian";
    case StabilitySourceKind::VoltaJacobian: return "volta_jacobian";
    case StabilitySourceKind::Matrix: return "matrix";
  }
  return "unknown";
}

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where.empty() ? "config" : where, "expected an object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!names.contains(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown setting");
  }
}

double read_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

State3 read_vec3(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(field, "expected an array of 3 numbers");
  return State3(read_number(v[0], field + "[0]"), read_number(v[1], field + "[1]"),
                read_number(v[2], field + "[2]"));
}

Matrix3<double> read_mat3(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(field, "expected a 3x3 array of numbers");
  Matrix3<double> m;
  for (int r = 0; r < 3; ++r) {
    const State3 row = read_vec3(v[static_cast<std::size_t>(r)], field + "[" + std::to_string(r) + "]");
    m.row(r) = row.transpose();
  }
  return m;
}

std::string read_string(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "expected a string");
  return v.get<std::string>();
}

SystemKind parse_system(const std::string& name) {
  if (name == "financial") return SystemKind::Financial;
  if (name == "volta") return SystemKind::Volta;
  if (name == "zero") return SystemKind::Zero;
  throw ConfigError("system", "unknown system '" + name + "' (expected financial, volta or zero)");
}

ControllerMode parse_mode(const std::string& name, const std::string& field) {
  if (name == "exact") return ControllerMode::ExactCancellation;
  if (name == "literal") return ControllerMode::Literal;
  throw ConfigError(field, "unknown controller mode '" + name + "' (expected literal or exact)");
}

StabilitySourceKind parse_source(const std::string& name) {
  for (auto kind : {StabilitySourceKind::ClosedLoop, StabilitySourceKind::FinancialEquilibrium,
                    StabilitySourceKind::FinancialJacobian, StabilitySourceKind::VoltaJacobian,
                    StabilitySourceKind::Matrix}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("stability.source", "unknown matrix source '" + name + "'");
}

double parse_double(const std::string& text, const std::string& field) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(field, "not a number: '" + text + "'");
  return value;
}

ordered_json vec_json(const State3& v) { return ordered_json::array({v(0), v(1), v(2)}); }

ordered_json mat_json(const Matrix3<double>& m) {
  ordered_json rows = ordered_json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return rows;
}

}  // namespace

MemoryWindow parse_memory(const std::string& text) {
  if (text == "full") return FullHistory{};
  if (text.starts_with("last:")) {
    const std::string digits = text.substr(5);
    std::size_t k = 0;
    const char* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), end, k);
    if (ec != std::errc() || ptr != end || digits.empty()) {
      throw ConfigError("memory", "expected last:<k> with a positive integer k, got '" + text + "'");
    }
    if (k == 0) throw ConfigError("memory", "window must retain at least one step");
    return LastK{k};
  }
  throw ConfigError("memory", "expected 'full' or 'last:<k>', got '" + text + "'");
}

std::string format_memory(const MemoryWindow& memory) {
  if (const auto* last = std::get_if<LastK>(&memory)) return "last:" + std::to_string(last->k);
  return "full";
}

std::array<double, 3> parse_orders(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) values.push_back(parse_double(item, "orders"));
  if (values.size() == 1) return {values[0], values[0], values[0]};
  if (values.size() != 3) throw ConfigError("orders", "expected q or q1,q2,q3");
  return {values[0], values[1], values[2]};
}

double ExperimentConfig::resolved_t_end() const {
  if (t_end) return *t_end;
  return command == Command::Simulate ? 50.0 : 10.0;
}

State3 ExperimentConfig::resolved_initial_state() const {
  if (initial_state) return *initial_state;
  switch (system) {
    case SystemKind::Financial: return master_initial;
    case SystemKind::Volta: return slave_initial;
    case SystemKind::Zero: break;
  }
  return State3::Zero();
}

GainMatrix ExperimentConfig::resolved_gain() const { return gain.value_or(gain_matrix_default(volta)); }

State3 ExperimentConfig::resolved_lambda() const { return lambda.value_or(State3(-1.0, -1.0, -1.0)); }

SolverConfig ExperimentConfig::solver_config() const {
  return SolverConfig::from_horizon(h, resolved_t_end(), memory);
}

SyncExperiment ExperimentConfig::experiment() const {
  SyncExperiment ex;
  ex.financial = financial;
  ex.volta = volta;
  ex.master0 = master_initial;
  ex.slave0 = slave_initial;
  ex.mode = mode;
  ex.gain = resolved_gain();
  ex.lambda = resolved_lambda();
  return ex;
}

void ExperimentConfig::validate() const {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(orders[i] > 0.0 && orders[i] <= 1.0)) {
      throw ConfigError("orders[" + std::to_string(i) + "]", "must lie in (0, 1], got " + std::to_string(orders[i]));
    }
  }
  for (std::size_t i = 0; i < order_sweep.size(); ++i) {
    if (!(order_sweep[i] > 0.0 && order_sweep[i] <= 1.0)) {
      throw ConfigError("order_sweep[" + std::to_string(i) + "]", "must lie in (0, 1]");
    }
  }
  if (!order_sweep.empty() && command != Command::Synchronize) {
    throw ConfigError("order_sweep", "only supported by synchronize");
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("solver.h", "must be positive");
  if (t_end && (!(*t_end > 0.0) || !std::isfinite(*t_end))) throw ConfigError("solver.t_end", "must be positive");
  if (resolved_t_end() < h) throw ConfigError("solver.t_end", "must be at least one step h");
  if (const auto* last = std::get_if<LastK>(&memory); last && last->k == 0) {
    throw ConfigError("solver.memory", "window must retain at least one step");
  }
  if (!(sync_tol > 0.0) || !std::isfinite(sync_tol)) throw ConfigError("sync_tol", "must be positive");

  if (command == Command::Synchronize && mode == ControllerMode::Literal && lambda) {
    throw ConfigError("controller.lambda", "only valid with the exact controller");
  }
  if (command == Command::Synchronize && mode == ControllerMode::ExactCancellation && gain) {
    throw ConfigError("controller.gain", "only valid with the literal controller");
  }
  if (lambda) {
    for (int i = 0; i < 3; ++i) {
      if (!((*lambda)(i) < 0.0)) {
        throw ConfigError("controller.lambda[" + std::to_string(i) + "]", "must be negative");
      }
    }
  }

  if (command == Command::Stability) {
    switch (stability.kind) {
      case StabilitySourceKind::FinancialEquilibrium: {
        if (financial.beta == 0.0 || financial.gamma == 0.0) {
          throw ConfigError("financial", "equilibria need beta != 0 and gamma != 0");
        }
        const auto count = static_cast<int>(financial_equilibria(financial).size());
        if (stability.equilibrium_index < 0 || stability.equilibrium_index >= count) {
          throw ConfigError("stability.equilibrium",
                            "index out of range: these parameters have " + std::to_string(count) + " equilibria");
        }
        break;
      }
      case StabilitySourceKind::FinancialJacobian:
      case StabilitySourceKind::VoltaJacobian:
        if (!stability.state) throw ConfigError("stability.state", "required for a Jacobian source");
        break;
      case StabilitySourceKind::Matrix:
        if (!stability.matrix) throw ConfigError("stability.matrix", "required for the matrix source");
        break;
      case StabilitySourceKind::ClosedLoop: break;
    }
  }
  if (convergence_problem != "quartic" && convergence_problem != "coupled") {
    throw ConfigError("problem", "expected quartic or coupled, got '" + convergence_problem + "'");
  }
  if (csv_name.empty()) throw ConfigError("output.csv", "must not be empty");
  if (report_name.empty()) throw ConfigError("output.report", "must not be empty");
}

ExperimentConfig parse_config(Command command, const json& doc) {
  ExperimentConfig c;
  c.command = command;
  if (doc.is_null()) return c;
  check_keys(doc, "",
             {"system", "financial", "volta", "orders", "order_sweep", "initial_state", "master_initial",
              "slave_initial", "solver", "controller", "sync_tol", "stability", "problem", "output"});

  if (doc.contains("system")) c.system = parse_system(read_string(doc["system"], "system"));
  if (doc.contains("financial")) {
    const auto& f = doc["financial"];
    check_keys(f, "financial", {"alpha", "beta", "gamma"});
    if (f.contains("alpha")) c.financial.alpha = read_number(f["alpha"], "financial.alpha");
    if (f.contains("beta")) c.financial.beta = read_number(f["beta"], "financial.beta");
    if (f.contains("gamma")) c.financial.gamma = read_number(f["gamma"], "financial.gamma");
  }
  if (doc.contains("volta")) {
    const auto& v = doc["volta"];
    check_keys(v, "volta", {"a", "b", "c"});
    if (v.contains("a")) c.volta.a = read_number(v["a"], "volta.a");
    if (v.contains("b")) c.volta.b = read_number(v["b"], "volta.b");
    if (v.contains("c")) c.volta.c = read_number(v["c"], "volta.c");
  }
  if (doc.contains("orders")) {
    const auto& o = doc["orders"];
    if (o.is_number()) {
      const double q = read_number(o, "orders");
      c.orders = {q, q, q};
    } else {
      const State3 q = read_vec3(o, "orders");
      c.orders = {q(0), q(1), q(2)};
    }
  }
  if (doc.contains("order_sweep")) {
    const auto& s = doc["order_sweep"];
    if (!s.is_array()) throw ConfigError("order_sweep", "expected an array of orders");
    for (std::size_t i = 0; i < s.size(); ++i) {
      c.order_sweep.push_back(read_number(s[i], "order_sweep[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("initial_state")) c.initial_state = read_vec3(doc["initial_state"], "initial_state");
  if (doc.contains("master_initial")) c.master_initial = read_vec3(doc["master_initial"], "master_initial");
  if (doc.contains("slave_initial")) c.slave_initial = read_vec3(doc["slave_initial"], "slave_initial");
  if (doc.contains("solver")) {
    const auto& s = doc["solver"];
    check_keys(s, "solver", {"h", "t_end", "memory"});
    if (s.contains("h")) c.h = read_number(s["h"], "solver.h");
    if (s.contains("t_end")) c.t_end = read_number(s["t_end"], "solver.t_end");
    if (s.contains("memory")) c.memory = parse_memory(read_string(s["memory"], "solver.memory"));
  }
  if (doc.contains("controller")) {
    const auto& ctl = doc["controller"];
    check_keys(ctl, "controller", {"mode", "lambda", "gain"});
    if (ctl.contains("mode")) c.mode = parse_mode(read_string(ctl["mode"], "controller.mode"), "controller.mode");
    if (ctl.contains("lambda")) c.lambda = read_vec3(ctl["lambda"], "controller.lambda");
    if (ctl.contains("gain")) c.gain = read_mat3(ctl["gain"], "controller.gain");
  }
  if (doc.contains("sync_tol")) c.sync_tol = read_number(doc["sync_tol"], "sync_tol");
  if (doc.contains("stability")) {
    const auto& st = doc["stability"];
    check_keys(st, "stability", {"source", "equilibrium", "state", "matrix"});
    if (st.contains("source")) c.stability.kind = parse_source(read_string(st["source"], "stability.source"));
    if (st.contains("equilibrium")) {
      if (!st["equilibrium"].is_number_integer()) throw ConfigError("stability.equilibrium", "expected an integer");
      c.stability.equilibrium_index = st["equilibrium"].get<int>();
    }
    if (st.contains("state")) c.stability.state = read_vec3(st["state"], "stability.state");
    if (st.contains("matrix")) c.stability.matrix = read_mat3(st["matrix"], "stability.matrix");
  }
  if (doc.contains("problem")) c.convergence_problem = read_string(doc["problem"], "problem");
  if (doc.contains("output")) {
    const auto& out = doc["output"];
    check_keys(out, "output", {"csv", "report"});
    if (out.contains("csv")) c.csv_name = read_string(out["csv"], "output.csv");
    if (out.contains("report")) c.report_name = read_string(out["report"], "output.report");
  }
  return c;
}

void apply_overrides(ExperimentConfig& config, const Overrides& overrides) {
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  if (overrides.h) config.h = *overrides.h;
  if (overrides.t_end) config.t_end = *overrides.t_end;
  if (overrides.orders) config.orders = parse_orders(*overrides.orders);
  if (overrides.mode) config.mode = parse_mode(*overrides.mode, "mode");
  if (overrides.memory) config.memory = parse_memory(*overrides.memory);
  if (overrides.problem) config.convergence_problem = *overrides.problem;
}

ExperimentConfig load_config(Command command, const std::optional<std::string>& path, const Overrides& overrides) {
  json doc;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("config", "cannot open '" + *path + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
  }
  ExperimentConfig config = parse_config(command, doc);
  apply_overrides(config, overrides);
  config.validate();
  return config;
}

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["command"] = to_string(c.command);
  if (c.command == Command::Simulate) {
    j["system"] = to_string(c.system);
    j["initial_state"] = vec_json(c.resolved_initial_state());
  }
  j["financial"] = {{"alpha", c.financial.alpha}, {"beta", c.financial.beta}, {"gamma", c.financial.gamma}};
  j["volta"] = {{"a", c.volta.a}, {"b", c.volta.b}, {"c", c.volta.c}};
  j["orders"] = c.orders;
  if (c.command == Command::Synchronize) {
    j["order_sweep"] = c.order_sweep;
    j["master_initial"] = vec_json(c.master_initial);
    j["slave_initial"] = vec_json(c.slave_initial);
    ordered_json ctl;
    ctl["mode"] = to_string(c.mode);
    if (c.mode == ControllerMode::ExactCancellation) {
      ctl["lambda"] = vec_json(c.resolved_lambda());
    } else {
      ctl["gain"] = mat_json(c.resolved_gain());
    }
    j["controller"] = ctl;
    j["sync_tol"] = c.sync_tol;
  }
  if (c.command == Command::Convergence) {
    j["problem"] = c.convergence_problem;
    j["output"] = {{"report", c.report_name}};
  }
  if (c.command == Command::Simulate || c.command == Command::Synchronize) {
    const SolverConfig s = c.solver_config();
    j["solver"] = {{"h", c.h}, {"t_end", c.resolved_t_end()}, {"n_steps", s.n_steps},
                   {"memory", format_memory(c.memory)}};
    j["output"] = {{"csv", c.csv_name}, {"report", c.report_name}};
  }
  if (c.command == Command::Stability) {
    ordered_json st;
    st["source"] = to_string(c.stability.kind);
    if (c.stability.kind == StabilitySourceKind::FinancialEquilibrium) {
      st["equilibrium"] = c.stability.equilibrium_index;
    }
    if (c.stability.state) st["state"] = vec_json(*c.stability.state);
    if (c.stability.matrix) st["matrix"] = mat_json(*c.stability.matrix);
    if (c.stability.kind == StabilitySourceKind::ClosedLoop) st["gain"] = mat_json(c.resolved_gain());
    j["stability"] = st;
    j["output"] = {{"report", c.report_name}};
  }
  return j;
}

}  // namespace fracsync::cli
