#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fracsync/core.hpp"
#include "fracsync/solver.hpp"

namespace fracsync {

/// Largest |z| accepted by mittag_leffler.
inline constexpr double kMittagLefflerMaxArg = 30.0;

/// E_q(z) = sum_k z^k / Gamma(q k + 1) for q in (0, 1] and |z| <= 30.
///
/// Alternating series with large intermediate terms are accumulated in
/// multiprecision sized to the largest term, so the result keeps full double
/// accuracy over the whole supported range.
///
/// Throws InvalidOrder or DomainExceeded.
[[nodiscard]] double mittag_leffler(double q, double z);

/// e0_i * E_{q_i}(-t^{q_i}): exact error of D^{q_i} e_i = -e_i.
[[nodiscard]] State3 predicted_error(const State3& e0, const FractionalOrders& orders, double t);

struct SyncSummary {
  std::optional<double> sync_time;
  State3 final_errors{State3::Zero()};
  double tol{1e-3};
};

/// First grid time after which max_i |e_i| stays below tol.
///
/// Throws MissingErrors when the trajectory has no error rows and
/// std::invalid_argument when tol <= 0.
[[nodiscard]] SyncSummary sync_time(const Trajectory& traj, double tol = 1e-3);

/// max_t ||a(t) - b(t)|| / ||a(0) - b(0)||.
[[nodiscard]] double divergence_factor(const Trajectory& a, const Trajectory& b);

struct ConvergenceReport {
  std::vector<double> step_sizes;
  std::vector<double> errors;
  /// log2(E_k / E_{k+1}) for consecutive halvings.
  std::vector<double> orders;
};

[[nodiscard]] std::vector<double> empirical_orders(std::span<const double> errors);

/// A problem with a known solution at t_end.
struct ConvergenceProblem {
  VectorField field;
  std::vector<double> orders;
  Eigen::VectorXd y0;
  double t_end{1.0};
  Eigen::VectorXd exact_at_end;
};

/// D^q y = Gamma(5) / Gamma(5 - q) t^{4 - q}, y(0) = 0, exact y = t^4.
[[nodiscard]] ConvergenceProblem quartic_problem(double q, double t_end = 1.0);

/// Same exact solution with the forcing coupled to the state:
/// D^q y = Gamma(5) / Gamma(5 - q) t^{4 - q} + t^4 - y. The forcing in
/// quartic_problem does not depend on y, so the predictor error never feeds
/// back and the scheme is second order for every q; this variant exposes the
/// min(2, 1 + q) behaviour.
[[nodiscard]] ConvergenceProblem coupled_quartic_problem(double q, double t_end = 1.0);

/// Integrate at h0, h0/2, ... (levels runs) and measure the max-norm error at t_end.
[[nodiscard]] ConvergenceReport convergence_order(const ConvergenceProblem& problem, double h0, int levels);

/// Order q* = (2/pi) min |arg(lambda)| above which the equilibrium with
/// Jacobian J violates the Matignon condition; clamped to [0, 2].
///
/// Throws DegenerateEigenvalue when J has a zero eigenvalue.
[[nodiscard]] double chaos_threshold(const Matrix3<double>& J);

}  // namespace fracsync
