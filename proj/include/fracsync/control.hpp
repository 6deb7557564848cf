#pragma once

#include <array>
#include <complex>
#include <string>

#include <Eigen/Core>

#include "fracsync/core.hpp"
#include "fracsync/solver.hpp"

namespace fracsync {

/// Constant feedback gain A in v = A e.
using GainMatrix = Matrix3<double>;

enum class ControllerMode {
  /// Nonlinear compensation transcribed term by term, plus v = A e.
  Literal,
  /// u = F(master) - G(slave) + diag(lambda) e, which imposes D^q e = diag(lambda) e.
  ExactCancellation,
};

[[nodiscard]] std::string_view to_string(ControllerMode mode);

/// Master (financial) and slave (Volta) states side by side.
struct CoupledState {
  State3 master;
  State3 slave;

  /// e = slave - master.
  [[nodiscard]] State3 error() const { return slave - master; }

  [[nodiscard]] Eigen::Matrix<double, 6, 1> stacked() const;
  static CoupledState from_stacked(const Eigen::VectorXd& y);
};

/// [[0, a, -1], [b, 0, 0], [1, 0, -1-c]].
[[nodiscard]] GainMatrix gain_matrix_default(const VoltaParams& p);

/// Linear part of the error dynamics before feedback: [[-1,-a,1],[-b,-1,0],[-1,0,c]].
[[nodiscard]] Matrix3<double> error_base_matrix(const VoltaParams& p);

/// error_base_matrix(p) + A.
[[nodiscard]] Matrix3<double> closed_loop_error_matrix(const GainMatrix& A, const VoltaParams& p);

[[nodiscard]] State3 control_literal(const State3& master, const State3& slave, const FinancialParams& fp,
                                     const VoltaParams& vp, const GainMatrix& A);

/// Throws InvalidGain unless every lambda_i < 0.
[[nodiscard]] State3 control_exact(const State3& master, const State3& slave, const FinancialParams& fp,
                                   const VoltaParams& vp, const State3& lambda);

/// Everything needed to evaluate the controlled master-slave pair.
struct SyncExperiment {
  FinancialParams financial{};
  VoltaParams volta{};
  State3 master0{2.0, -1.0, 1.0};
  State3 slave0{8.0, 2.0, 3.0};
  ControllerMode mode{ControllerMode::ExactCancellation};
  GainMatrix gain{gain_matrix_default(VoltaParams{})};
  State3 lambda{-1.0, -1.0, -1.0};

  /// Control input at a coupled state.
  [[nodiscard]] State3 control(const CoupledState& s) const;
};

/// Six derivatives: financial_rhs(master), then volta_rhs(slave) + u.
[[nodiscard]] Eigen::Matrix<double, 6, 1> coupled_rhs(const CoupledState& s, const SyncExperiment& ex);

/// Integrate the coupled pair with the same orders on master and slave and
/// fill the error and control rows of the trajectory.
[[nodiscard]] Trajectory synchronize(const SyncExperiment& ex, const FractionalOrders& orders,
                                     const SolverConfig& cfg);

/// Roots of det(M - lambda I) from the closed-form cubic, sorted by (real, imag).
[[nodiscard]] std::array<std::complex<double>, 3> eigen3(const Matrix3<double>& M);

struct StabilityReport {
  std::array<std::complex<double>, 3> eigenvalues{};
  /// min |arg(lambda)| with the principal argument in (-pi, pi].
  double min_arg{0.0};
  /// q_i * pi / 2 per order.
  std::array<double, 3> thresholds{};
  std::array<bool, 3> satisfied{};
  bool satisfied_all{false};
  /// Set when some eigenvalue is zero, in which case nothing is satisfied.
  bool degenerate{false};
  std::string note;
};

/// Matignon criterion |arg(lambda)| > q pi / 2 for every eigenvalue of M.
[[nodiscard]] StabilityReport matignon_check(const Matrix3<double>& M, const FractionalOrders& orders);

/// Whether an eigenvalue of M should be treated as exactly zero.
[[nodiscard]] bool is_zero_eigenvalue(std::complex<double> lambda, const Matrix3<double>& M);

}  // namespace fracsync
