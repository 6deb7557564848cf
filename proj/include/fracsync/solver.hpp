#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "fracsync/core.hpp"

namespace fracsync {

/// Keep every past step in the history convolution.
struct FullHistory {
  friend bool operator==(const FullHistory&, const FullHistory&) = default;
};

/// Short-memory truncation: only the most recent `k` steps enter the sums.
struct LastK {
  std::size_t k{1};
  friend bool operator==(const LastK&, const LastK&) = default;
};

using MemoryWindow = std::variant<FullHistory, LastK>;

struct SolverConfig {
  double h{0.0005};
  std::size_t n_steps{1};
  MemoryWindow memory{FullHistory{}};

  /// Grid with round(t_end / h) steps.
  static SolverConfig from_horizon(double h, double t_end, MemoryWindow memory = FullHistory{});

  /// Throws std::invalid_argument on h <= 0, n_steps == 0 or k == 0.
  void validate() const;

  [[nodiscard]] double t_end() const { return static_cast<double>(n_steps) * h; }
};

/// Step at which a component left the finite range.
struct NonFiniteState {
  std::size_t step{0};
};

/// Uniform-grid solution. Column j of `states` is the state at times(j).
/// Coupled runs also fill `errors` and `controls` (3 rows each).
struct Trajectory {
  double h{0.0};
  Eigen::VectorXd times;
  Eigen::MatrixXd states;
  Eigen::MatrixXd errors;
  Eigen::MatrixXd controls;
  std::optional<NonFiniteState> failure;

  [[nodiscard]] Eigen::Index size() const { return times.size(); }
  [[nodiscard]] Eigen::Index dimension() const { return states.rows(); }
  [[nodiscard]] bool ok() const { return !failure.has_value(); }
  [[nodiscard]] bool has_errors() const { return errors.cols() > 0 && errors.cols() == times.size(); }
  [[nodiscard]] auto state(Eigen::Index j) const { return states.col(j); }
};

/// f(t, y) for a system of any dimension.
using VectorField = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

/// Predictor weights b_{j,n+1} = (n+1-j)^q - (n-j)^q for j = 0..n.
[[nodiscard]] std::vector<double> weights_b(double q, std::size_t n);

/// Corrector weights a_{j,n+1} for j = 0..n+1 (the last one is 1).
[[nodiscard]] std::vector<double> weights_a(double q, std::size_t n);

/// Product-integration weights for one order, grown on demand.
///
/// Both weight families are Toeplitz in n - j except for a_{0,n+1}, so a
/// single lag-indexed table per family covers every step.
class AbmWeightTable {
public:
  explicit AbmWeightTable(double q);

  [[nodiscard]] double order() const { return q_; }

  /// Ensure lags 0..n are available.
  void grow_to(std::size_t n);

  /// b at lag k = n - j.
  [[nodiscard]] std::span<const double> predictor_lags() const { return b_; }
  /// a_{j,n+1} for 1 <= j <= n at lag k = n - j.
  [[nodiscard]] std::span<const double> corrector_lags() const { return a_; }
  /// a_{0,n+1}.
  [[nodiscard]] double corrector_start(std::size_t n) const;

private:
  double q_;
  std::vector<double> b_;
  std::vector<double> a_;
};

/// Fractional Adams-Bashforth-Moulton PECE integration of D^{q_i} y_i = f_i(t, y).
///
/// Each component uses its own order; one predictor and one corrector
/// evaluation per step. On a non-finite state the trajectory is truncated to
/// the last finite step and `failure` records the offending step.
///
/// Throws InvalidOrder for any order outside (0, 1] and std::invalid_argument
/// for a bad config, mismatched dimensions or a non-finite initial state.
[[nodiscard]] Trajectory integrate(const VectorField& f, std::span<const double> orders,
                                   const Eigen::VectorXd& y0, const SolverConfig& cfg);

[[nodiscard]] Trajectory integrate(const SystemDef& system, const FractionalOrders& orders,
                                   const State3& y0, const SolverConfig& cfg);

/// Integer-order predictor-corrector written as running sums: rectangle-rule
/// predictor, trapezoidal corrector, both anchored at y0. This is the q = 1
/// member of the fractional scheme computed without any convolution, used as
/// an independent check of `integrate`.
[[nodiscard]] Trajectory integrate_classical_pece(const VectorField& f, const Eigen::VectorXd& y0,
                                                  const SolverConfig& cfg);

}  // namespace fracsync
