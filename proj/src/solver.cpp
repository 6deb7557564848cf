#include "fracsync/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace fracsync {
namespace {

// (k+1)^q - k^q
double predictor_lag_weight(double q, std::size_t k) {
  const double kd = static_cast<double>(k);
  return std::pow(kd + 1.0, q) - std::pow(kd, q);
}

// (k+2)^{q+1} + k^{q+1} - 2 (k+1)^{q+1}
double corrector_lag_weight(double q, std::size_t k) {
  const double kd = static_cast<double>(k);
  const double p = q + 1.0;
  return std::pow(kd + 2.0, p) + std::pow(kd, p) - 2.0 * std::pow(kd + 1.0, p);
}

// n^{q+1} - (n - q) (n+1)^q
double corrector_start_weight(double q, std::size_t n) {
  const double nd = static_cast<double>(n);
  return std::pow(nd, q + 1.0) - (nd - q) * std::pow(nd + 1.0, q);
}

std::size_t window_start(const MemoryWindow& memory, std::size_t n) {
  if (const auto* last = std::get_if<LastK>(&memory)) {
    return n + 1 > last->k ? n + 1 - last->k : 0;
  }
  return 0;
}

Trajectory make_trajectory(Eigen::Index dim, const SolverConfig& cfg) {
  const auto points = static_cast<Eigen::Index>(cfg.n_steps + 1);
  Trajectory traj;
  traj.h = cfg.h;
  traj.times.resize(points);
  for (Eigen::Index j = 0; j < points; ++j) traj.times(j) = static_cast<double>(j) * cfg.h;
  traj.states.resize(dim, points);
  return traj;
}

void truncate(Trajectory& traj, std::size_t last_good) {
  const auto points = static_cast<Eigen::Index>(last_good + 1);
  traj.times.conservativeResize(points);
  traj.states.conservativeResize(Eigen::NoChange, points);
  traj.failure = NonFiniteState{last_good + 1};
}

void check_initial(const Eigen::VectorXd& y0, const SolverConfig& cfg) {
  cfg.validate();
  if (y0.size() == 0) throw std::invalid_argument("initial state is empty");
  if (!y0.allFinite()) throw std::invalid_argument("initial state must be finite");
}

}  // namespace

SolverConfig SolverConfig::from_horizon(double h, double t_end, MemoryWindow memory) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size h must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be positive");
  const double steps = std::round(t_end / h);
  return SolverConfig{h, static_cast<std::size_t>(std::max(1.0, steps)), memory};
}

void SolverConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size h must be positive");
  if (n_steps == 0) throw std::invalid_argument("n_steps must be at least 1");
  if (const auto* last = std::get_if<LastK>(&memory); last && last->k == 0) {
    throw std::invalid_argument("memory window must retain at least one step");
  }
}

std::vector<double> weights_b(double q, std::size_t n) {
  check_order(q);
  std::vector<double> w(n + 1);
  for (std::size_t j = 0; j <= n; ++j) w[j] = predictor_lag_weight(q, n - j);
  return w;
}

std::vector<double> weights_a(double q, std::size_t n) {
  check_order(q);
  std::vector<double> w(n + 2);
  w[0] = corrector_start_weight(q, n);
  for (std::size_t j = 1; j <= n; ++j) w[j] = corrector_lag_weight(q, n - j);
  w[n + 1] = 1.0;
  return w;
}

AbmWeightTable::AbmWeightTable(double q) : q_(q) { check_order(q); }

void AbmWeightTable::grow_to(std::size_t n) {
  for (std::size_t k = b_.size(); k <= n; ++k) b_.push_back(predictor_lag_weight(q_, k));
  for (std::size_t k = a_.size(); k <= n; ++k) a_.push_back(corrector_lag_weight(q_, k));
}

double AbmWeightTable::corrector_start(std::size_t n) const { return corrector_start_weight(q_, n); }

Trajectory integrate(const VectorField& f, std::span<const double> orders, const Eigen::VectorXd& y0,
                     const SolverConfig& cfg) {
  for (double q : orders) check_order(q);
  check_initial(y0, cfg);
  const Eigen::Index dim = y0.size();
  if (static_cast<Eigen::Index>(orders.size()) != dim) {
    throw std::invalid_argument("expected " + std::to_string(dim) + " orders, got " +
                                std::to_string(orders.size()));
  }

  // One weight table per distinct order.
  std::vector<AbmWeightTable> tables;
  std::vector<std::size_t> table_of(orders.size());
  {
    std::map<double, std::size_t> seen;
    for (std::size_t i = 0; i < orders.size(); ++i) {
      auto [it, inserted] = seen.try_emplace(orders[i], tables.size());
      if (inserted) tables.emplace_back(orders[i]);
      table_of[i] = it->second;
    }
  }
  Eigen::VectorXd pred_scale(dim), corr_scale(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double q = orders[i];
    const double hq = std::pow(cfg.h, q);
    pred_scale(i) = hq / std::tgamma(q + 1.0);
    corr_scale(i) = hq / std::tgamma(q + 2.0);
  }

  Trajectory traj = make_trajectory(dim, cfg);
  traj.states.col(0) = y0;

  // Row i holds f_i(t_j, y_j) contiguously.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> history(dim, cfg.n_steps + 1);
  history.col(0) = f(0.0, y0);

  Eigen::VectorXd predicted(dim), memory_term(dim), corrected(dim);
  for (std::size_t n = 0; n < cfg.n_steps; ++n) {
    for (auto& table : tables) table.grow_to(n);
    const std::size_t first = window_start(cfg.memory, n);
    const auto span_len = static_cast<Eigen::Index>(n - first + 1);
    const std::size_t first_inner = std::max<std::size_t>(first, 1);
    const auto inner_len = static_cast<Eigen::Index>(n + 1 - first_inner);

    for (Eigen::Index i = 0; i < dim; ++i) {
      const AbmWeightTable& table = tables[table_of[i]];
      const auto row = history.row(i);

      Eigen::Map<const Eigen::VectorXd> b(table.predictor_lags().data(), span_len);
      const double b_sum = b.reverse().dot(row.segment(static_cast<Eigen::Index>(first), span_len).transpose());
      predicted(i) = y0(i) + pred_scale(i) * b_sum;

      double a_sum = first == 0 ? table.corrector_start(n) * row(0) : 0.0;
      if (inner_len > 0) {
        Eigen::Map<const Eigen::VectorXd> a(table.corrector_lags().data(), inner_len);
        a_sum += a.reverse().dot(row.segment(static_cast<Eigen::Index>(first_inner), inner_len).transpose());
      }
      memory_term(i) = a_sum;
    }

    const double t_next = traj.times(static_cast<Eigen::Index>(n + 1));
    if (!predicted.allFinite()) {
      truncate(traj, n);
      return traj;
    }
    const Eigen::VectorXd f_pred = f(t_next, predicted);
    corrected = y0 + corr_scale.cwiseProduct(f_pred + memory_term);
    if (!corrected.allFinite()) {
      truncate(traj, n);
      return traj;
    }
    traj.states.col(static_cast<Eigen::Index>(n + 1)) = corrected;
    history.col(static_cast<Eigen::Index>(n + 1)) = f(t_next, corrected);
  }
  return traj;
}

Trajectory integrate(const SystemDef& system, const FractionalOrders& orders, const State3& y0,
                     const SolverConfig& cfg) {
  const auto& q = orders.values();
  return integrate(VectorField(system), std::span<const double>(q.data(), q.size()), Eigen::VectorXd(y0), cfg);
}

Trajectory integrate_classical_pece(const VectorField& f, const Eigen::VectorXd& y0, const SolverConfig& cfg) {
  check_initial(y0, cfg);
  const Eigen::Index dim = y0.size();
  Trajectory traj = make_trajectory(dim, cfg);
  traj.states.col(0) = y0;

  const Eigen::VectorXd f0 = f(0.0, y0);
  Eigen::VectorXd running = f0;                        // sum_{j=0}^{n} f_j
  Eigen::VectorXd inner = Eigen::VectorXd::Zero(dim);  // sum_{j=1}^{n} f_j
  for (std::size_t n = 0; n < cfg.n_steps; ++n) {
    const double t_next = traj.times(static_cast<Eigen::Index>(n + 1));
    const Eigen::VectorXd predicted = y0 + cfg.h * running;
    if (!predicted.allFinite()) {
      truncate(traj, n);
      return traj;
    }
    const Eigen::VectorXd f_pred = f(t_next, predicted);
    const Eigen::VectorXd corrected = y0 + (cfg.h / 2.0) * (f_pred + f0 + 2.0 * inner);
    if (!corrected.allFinite()) {
      truncate(traj, n);
      return traj;
    }
    traj.states.col(static_cast<Eigen::Index>(n + 1)) = corrected;
    const Eigen::VectorXd f_new = f(t_next, corrected);
    running += f_new;
    inner += f_new;
  }
  return traj;
}

}  // namespace fracsync
