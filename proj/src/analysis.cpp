#include "fracsync/analysis.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracsync/control.hpp"

namespace fracsync {

State3 predicted_error(const State3& e0, const FractionalOrders& orders, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be non-negative");
  const auto& q = orders.values();
  std::array<double, 3> ml{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto first = static_cast<std::size_t>(std::find(q.begin(), q.end(), q[i]) - q.begin());
    if (first < i) {
      ml[i] = ml[first];
      continue;
    }
    const double arg = std::pow(t, q[i]);
    if (arg > kMittagLefflerMaxArg) {
      throw DomainExceeded("t^q = " + std::to_string(arg) + " exceeds the supported range");
    }
    ml[i] = mittag_leffler(q[i], -arg);
  }
  return e0.cwiseProduct(State3(ml[0], ml[1], ml[2]));
}

SyncSummary sync_time(const Trajectory& traj, double tol) {
  if (!traj.has_errors()) throw MissingErrors("trajectory carries no error rows");
  if (!(tol > 0.0)) throw std::invalid_argument("sync tolerance must be positive");

  SyncSummary summary;
  summary.tol = tol;
  const Eigen::Index points = traj.size();
  summary.final_errors = traj.errors.col(points - 1);

  // Walk back to the last excursion at or above tol.
  Eigen::Index first_good = points;
  for (Eigen::Index j = points - 1; j >= 0; --j) {
    if (!(traj.errors.col(j).cwiseAbs().maxCoeff() < tol)) break;
    first_good = j;
  }
  if (first_good < points) summary.sync_time = traj.times(first_good);
  return summary;
}

double divergence_factor(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size() || a.dimension() != b.dimension() || a.times != b.times) {
    throw GridMismatch("trajectories must share the same grid and dimension");
  }
  if (a.size() == 0) throw GridMismatch("empty trajectories");
  const double initial = (a.states.col(0) - b.states.col(0)).norm();
  if (!(initial > 0.0)) throw ZeroInitialSeparation("initial separation must be positive");
  const double widest = (a.states - b.states).colwise().norm().maxCoeff();
  return widest / initial;
}

std::vector<double> empirical_orders(std::span<const double> errors) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) out.push_back(std::log2(errors[k] / errors[k + 1]));
  return out;
}

ConvergenceProblem quartic_problem(double q, double t_end) {
  check_order(q);
  const double scale = std::tgamma(5.0) / std::tgamma(5.0 - q);
  ConvergenceProblem problem;
  problem.field = [scale, q](double t, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, scale * std::pow(t, 4.0 - q));
  };
  problem.orders = {q};
  problem.y0 = Eigen::VectorXd::Zero(1);
  problem.t_end = t_end;
  problem.exact_at_end = Eigen::VectorXd::Constant(1, std::pow(t_end, 4.0));
  return problem;
}

ConvergenceProblem coupled_quartic_problem(double q, double t_end) {
  ConvergenceProblem problem = quartic_problem(q, t_end);
  const double scale = std::tgamma(5.0) / std::tgamma(5.0 - q);
  problem.field = [scale, q](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return Eigen::VectorXd::Constant(1, scale * std::pow(t, 4.0 - q) + std::pow(t, 4.0) - y(0));
  };
  return problem;
}

ConvergenceReport convergence_order(const ConvergenceProblem& problem, double h0, int levels) {
  if (levels < 2) throw std::invalid_argument("convergence study needs at least two levels");
  ConvergenceReport report;
  double h = h0;
  for (int level = 0; level < levels; ++level, h /= 2.0) {
    const SolverConfig cfg = SolverConfig::from_horizon(h, problem.t_end);
    const Trajectory traj = integrate(problem.field, problem.orders, problem.y0, cfg);
    if (!traj.ok()) throw std::runtime_error("non-finite state during convergence study");
    const Eigen::VectorXd end = traj.states.col(traj.size() - 1);
    report.step_sizes.push_back(h);
    report.errors.push_back((end - problem.exact_at_end).cwiseAbs().maxCoeff());
  }
  report.orders = empirical_orders(report.errors);
  return report;
}

double chaos_threshold(const Matrix3<double>& J) {
  const auto lambdas = eigen3(J);
  double min_arg = std::numbers::pi;
  for (const auto& lambda : lambdas) {
    if (is_zero_eigenvalue(lambda, J)) throw DegenerateEigenvalue("Jacobian has a zero eigenvalue");
    min_arg = std::min(min_arg, std::abs(std::arg(lambda)));
  }
  return std::clamp(2.0 / std::numbers::pi * min_arg, 0.0, 2.0);
}

}  // namespace fracsync
