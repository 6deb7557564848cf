#pragma once

#include <array>
#include <cmath>
#include <initializer_list>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fracsync/errors.hpp"

namespace fracsync {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// State of one three-dimensional system in model units.
using State3 = Vector3<double>;

template <typename Derived>
[[nodiscard]] bool all_finite(const Eigen::DenseBase<Derived>& v) {
  return v.allFinite();
}

/// Per-component Caputo orders, each in (0, 1].
class FractionalOrders {
public:
  /// Commensurate orders q for every component.
  explicit FractionalOrders(double q);
  FractionalOrders(double q1, double q2, double q3);
  explicit FractionalOrders(const std::array<double, 3>& q);

  [[nodiscard]] double operator[](std::size_t i) const { return q_[i]; }
  [[nodiscard]] const std::array<double, 3>& values() const { return q_; }
  [[nodiscard]] bool commensurate() const { return q_[0] == q_[1] && q_[1] == q_[2]; }
  [[nodiscard]] double max() const;

  /// Orders for a composite system made of `copies` stacked three-dimensional blocks.
  [[nodiscard]] std::vector<double> repeated(std::size_t copies) const;

  friend bool operator==(const FractionalOrders&, const FractionalOrders&) = default;

private:
  std::array<double, 3> q_;
};

/// Throws InvalidOrder unless q lies in (0, 1].
void check_order(double q);

// Financial system: saving amount, cost per investment, elasticity of demand.
template <typename Scalar>
struct FinancialParamsT {
  Scalar alpha{1};
  Scalar beta{0.1};
  Scalar gamma{1};
};
using FinancialParams = FinancialParamsT<double>;

// Volta system.
template <typename Scalar>
struct VoltaParamsT {
  Scalar a{19};
  Scalar b{11};
  Scalar c{0.73};
};
using VoltaParams = VoltaParamsT<double>;

/// dx = z + (y - alpha) x, dy = 1 - beta y - x^2, dz = -x - gamma z.
template <typename Scalar>
[[nodiscard]] Vector3<Scalar> financial_rhs(const Vector3<Scalar>& s, const FinancialParamsT<Scalar>& p) {
  const Scalar x = s(0), y = s(1), z = s(2);
  return Vector3<Scalar>(z + (y - p.alpha) * x, Scalar(1) - p.beta * y - x * x, -x - p.gamma * z);
}

template <typename Scalar>
[[nodiscard]] Matrix3<Scalar> financial_jacobian(const Vector3<Scalar>& s, const FinancialParamsT<Scalar>& p) {
  const Scalar x = s(0), y = s(1);
  Matrix3<Scalar> j;
  j << y - p.alpha, x, Scalar(1),
       Scalar(-2) * x, -p.beta, Scalar(0),
       Scalar(-1), Scalar(0), -p.gamma;
  return j;
}

/// dx = -x - a y - z y, dy = -y - b x - x z, dz = c z + x y + 1.
template <typename Scalar>
[[nodiscard]] Vector3<Scalar> volta_rhs(const Vector3<Scalar>& s, const VoltaParamsT<Scalar>& p) {
  const Scalar x = s(0), y = s(1), z = s(2);
  return Vector3<Scalar>(-x - p.a * y - z * y, -y - p.b * x - x * z, p.c * z + x * y + Scalar(1));
}

template <typename Scalar>
[[nodiscard]] Matrix3<Scalar> volta_jacobian(const Vector3<Scalar>& s, const VoltaParamsT<Scalar>& p) {
  const Scalar x = s(0), y = s(1), z = s(2);
  Matrix3<Scalar> j;
  j << Scalar(-1), -p.a - z, -y,
       -p.b - z, Scalar(-1), -x,
       y, x, p.c;
  return j;
}

/// All real equilibria of the financial system. The x = 0 branch comes first,
/// followed by the (+, -) pair when it exists.
///
/// Throws DegenerateParameters when beta or gamma is zero.
[[nodiscard]] std::vector<State3> financial_equilibria(const FinancialParams& p);

enum class SystemKind { Financial, Volta, Zero };

[[nodiscard]] std::string_view to_string(SystemKind kind);

/// One of the closed set of three-dimensional vector fields. `Zero` is the
/// identically vanishing field used for solver diagnostics.
class SystemDef {
public:
  static SystemDef financial(const FinancialParams& p = {});
  static SystemDef volta(const VoltaParams& p = {});
  static SystemDef zero();

  [[nodiscard]] SystemKind kind() const { return kind_; }
  [[nodiscard]] std::string_view name() const { return to_string(kind_); }
  static constexpr int dimension = 3;

  [[nodiscard]] State3 rhs(const State3& s) const;
  [[nodiscard]] Matrix3<double> jacobian(const State3& s) const;

  /// Autonomous field adapter for the integrator.
  [[nodiscard]] Eigen::VectorXd operator()(double /*t*/, const Eigen::VectorXd& y) const {
    return rhs(State3(y));
  }

  [[nodiscard]] const FinancialParams& financial_params() const { return fp_; }
  [[nodiscard]] const VoltaParams& volta_params() const { return vp_; }

private:
  explicit SystemDef(SystemKind kind) : kind_(kind) {}

  SystemKind kind_;
  FinancialParams fp_{};
  VoltaParams vp_{};
};

}  // namespace fracsync
