#include "fracsync/core.hpp"

#include <algorithm>
#include <string>

namespace fracsync {

void check_order(double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw InvalidOrder("fractional order must lie in (0, 1], got " + std::to_string(q));
  }
}

FractionalOrders::FractionalOrders(double q) : FractionalOrders(q, q, q) {}

FractionalOrders::FractionalOrders(double q1, double q2, double q3) : q_{q1, q2, q3} {
  for (double q : q_) check_order(q);
}

FractionalOrders::FractionalOrders(const std::array<double, 3>& q) : FractionalOrders(q[0], q[1], q[2]) {}

double FractionalOrders::max() const { return *std::max_element(q_.begin(), q_.end()); }

std::vector<double> FractionalOrders::repeated(std::size_t copies) const {
  std::vector<double> out;
  out.reserve(3 * copies);
  for (std::size_t c = 0; c < copies; ++c) out.insert(out.end(), q_.begin(), q_.end());
  return out;
}

std::vector<State3> financial_equilibria(const FinancialParams& p) {
  if (p.beta == 0.0 || p.gamma == 0.0) {
    throw DegenerateParameters("financial equilibria need beta != 0 and gamma != 0");
  }
  std::vector<State3> out;
  out.emplace_back(0.0, 1.0 / p.beta, 0.0);

  // Nonzero-x branch: z = -x/gamma, y = alpha + 1/gamma, x^2 = 1 - beta*y.
  const double y = p.alpha + 1.0 / p.gamma;
  const double x2 = 1.0 - p.beta * y;
  if (x2 > 0.0) {
    const double x = std::sqrt(x2);
    out.emplace_back(x, y, -x / p.gamma);
    out.emplace_back(-x, y, x / p.gamma);
  }
  return out;
}

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::Financial: return "financial";
    case SystemKind::Volta: return "volta";
    case SystemKind::Zero: return "zero";
  }
  return "unknown";
}

SystemDef SystemDef::financial(const FinancialParams& p) {
  SystemDef s(SystemKind::Financial);
  s.fp_ = p;
  return s;
}

SystemDef SystemDef::volta(const VoltaParams& p) {
  SystemDef s(SystemKind::Volta);
  s.vp_ = p;
  return s;
}

SystemDef SystemDef::zero() { return SystemDef(SystemKind::Zero); }

State3 SystemDef::rhs(const State3& s) const {
  switch (kind_) {
    case SystemKind::Financial: return financial_rhs(s, fp_);
    case SystemKind::Volta: return volta_rhs(s, vp_);
    case SystemKind::Zero: break;
  }
  return State3::Zero();
}

Matrix3<double> SystemDef::jacobian(const State3& s) const {
  switch (kind_) {
    case SystemKind::Financial: return financial_jacobian(s, fp_);
    case SystemKind::Volta: return volta_jacobian(s, vp_);
    case SystemKind::Zero: break;
  }
  return Matrix3<double>::Zero();
}

}  // namespace fracsync
