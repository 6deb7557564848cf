#include "fracsync/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

namespace fracsync {

std::string_view to_string(ControllerMode mode) {
  switch (mode) {
    case ControllerMode::Literal: return "literal";
    case ControllerMode::ExactCancellation: return "exact";
  }
  return "unknown";
}

Eigen::Matrix<double, 6, 1> CoupledState::stacked() const {
  Eigen::Matrix<double, 6, 1> y;
  y << master, slave;
  return y;
}

CoupledState CoupledState::from_stacked(const Eigen::VectorXd& y) {
  return CoupledState{y.head<3>(), y.tail<3>()};
}

GainMatrix gain_matrix_default(const VoltaParams& p) {
  GainMatrix A;
  A << 0.0, p.a, -1.0,
       p.b, 0.0, 0.0,
       1.0, 0.0, -1.0 - p.c;
  return A;
}

Matrix3<double> error_base_matrix(const VoltaParams& p) {
  Matrix3<double> m;
  m << -1.0, -p.a, 1.0,
       -p.b, -1.0, 0.0,
       -1.0, 0.0, p.c;
  return m;
}

Matrix3<double> closed_loop_error_matrix(const GainMatrix& A, const VoltaParams& p) {
  return error_base_matrix(p) + A;
}

State3 control_literal(const State3& master, const State3& slave, const FinancialParams& fp,
                       const VoltaParams& vp, const GainMatrix& A) {
  const double x1 = master(0), y1 = master(1), z1 = master(2);
  const double x2 = slave(0), y2 = slave(1), z2 = slave(2);
  const State3 v = A * (slave - master);
  return State3(-(fp.alpha - 1.0) * x1 + (x1 + vp.a) * y1 + (1.0 + y2) + v(0),
                -(fp.beta - 1.0) * y1 + (vp.b - x1) * x1 + x2 * z2 + 1.0 + v(1),
                -(y2 + 1.0) * x2 - (vp.c + fp.gamma) * z1 - 1.0 + v(2));
}

State3 control_exact(const State3& master, const State3& slave, const FinancialParams& fp,
                     const VoltaParams& vp, const State3& lambda) {
  if (!(lambda.array() < 0.0).all()) {
    throw InvalidGain("closed-loop eigenvalues lambda must all be negative");
  }
  return financial_rhs(master, fp) - volta_rhs(slave, vp) + lambda.cwiseProduct(slave - master);
}

State3 SyncExperiment::control(const CoupledState& s) const {
  if (mode == ControllerMode::Literal) return control_literal(s.master, s.slave, financial, volta, gain);
  return control_exact(s.master, s.slave, financial, volta, lambda);
}

Eigen::Matrix<double, 6, 1> coupled_rhs(const CoupledState& s, const SyncExperiment& ex) {
  Eigen::Matrix<double, 6, 1> d;
  const State3 master = financial_rhs(s.master, ex.financial);
  if (ex.mode == ControllerMode::ExactCancellation) {
    if (!(ex.lambda.array() < 0.0).all()) throw InvalidGain("closed-loop eigenvalues lambda must all be negative");
    // G(slave) + u with the slave field cancelled symbolically, so that
    // master == slave gives bit-identical halves.
    d << master, master + ex.lambda.cwiseProduct(s.error());
  } else {
    d << master, volta_rhs(s.slave, ex.volta) + ex.control(s);
  }
  return d;
}

Trajectory synchronize(const SyncExperiment& ex, const FractionalOrders& orders, const SolverConfig& cfg) {
  if (ex.mode == ControllerMode::ExactCancellation && !(ex.lambda.array() < 0.0).all()) {
    throw InvalidGain("closed-loop eigenvalues lambda must all be negative");
  }
  if (!ex.gain.allFinite()) throw InvalidGain("gain matrix entries must be finite");

  const VectorField field = [&ex](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return coupled_rhs(CoupledState::from_stacked(y), ex);
  };
  const std::vector<double> q = orders.repeated(2);
  const CoupledState start{ex.master0, ex.slave0};
  Trajectory traj = integrate(field, q, Eigen::VectorXd(start.stacked()), cfg);

  const Eigen::Index points = traj.size();
  traj.errors.resize(3, points);
  traj.controls.resize(3, points);
  for (Eigen::Index j = 0; j < points; ++j) {
    const CoupledState s = CoupledState::from_stacked(traj.states.col(j));
    traj.errors.col(j) = s.error();
    traj.controls.col(j) = ex.control(s);
  }
  return traj;
}

namespace {

// Roots of t^3 + p t + q = 0, shifted back by `shift`.
std::array<std::complex<double>, 3> depressed_cubic_roots(double p, double q, double shift) {
  using C = std::complex<double>;
  const double r = -q / 2.0;
  const double disc = r * r + (p / 3.0) * (p / 3.0) * (p / 3.0);

  if (disc > 0.0) {
    // One real root and a conjugate pair.
    const double s = std::sqrt(disc);
    const double u = std::cbrt(r + std::copysign(s, r));
    const double v = u == 0.0 ? 0.0 : -p / (3.0 * u);
    const double re = -(u + v) / 2.0 + shift;
    const double im = std::sqrt(3.0) / 2.0 * (u - v);
    return {C(u + v + shift, 0.0), C(re, im), C(re, -im)};
  }
  if (p == 0.0) return {C(shift, 0.0), C(shift, 0.0), C(shift, 0.0)};

  // Three real roots, possibly repeated.
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  constexpr double third = 2.0 * std::numbers::pi / 3.0;
  return {C(m * std::cos(theta) + shift, 0.0), C(m * std::cos(theta - third) + shift, 0.0),
          C(m * std::cos(theta - 2.0 * third) + shift, 0.0)};
}

}  // namespace

std::array<std::complex<double>, 3> eigen3(const Matrix3<double>& M) {
  const double shift = M.trace() / 3.0;
  const Matrix3<double> B = M - shift * Matrix3<double>::Identity();
  // det(B - t I) = -(t^3 + p t + q) for traceless B.
  const double p = B(0, 0) * B(1, 1) - B(0, 1) * B(1, 0) + B(0, 0) * B(2, 2) - B(0, 2) * B(2, 0) +
                   B(1, 1) * B(2, 2) - B(1, 2) * B(2, 1);
  const double q = -B.determinant();
  auto roots = depressed_cubic_roots(p, q, shift);
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

bool is_zero_eigenvalue(std::complex<double> lambda, const Matrix3<double>& M) {
  return std::abs(lambda) <= 1e-12 * std::max(1.0, M.norm());
}

StabilityReport matignon_check(const Matrix3<double>& M, const FractionalOrders& orders) {
  StabilityReport report;
  report.eigenvalues = eigen3(M);
  report.min_arg = std::numbers::pi;
  for (const auto& lambda : report.eigenvalues) {
    if (is_zero_eigenvalue(lambda, M)) {
      report.degenerate = true;
      report.min_arg = 0.0;
    } else {
      report.min_arg = std::min(report.min_arg, std::abs(std::arg(lambda)));
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    report.thresholds[i] = orders[i] * std::numbers::pi / 2.0;
    report.satisfied[i] = !report.degenerate && report.min_arg > report.thresholds[i];
  }
  const double worst = *std::max_element(report.thresholds.begin(), report.thresholds.end());
  report.satisfied_all = !report.degenerate && report.min_arg > worst;
  if (report.degenerate) report.note = "zero eigenvalue: argument undefined, criterion cannot hold";
  return report;
}

}  // namespace fracsync
