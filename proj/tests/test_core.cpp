#include <cmath>
#include <random>

#include "doctest.h"

#include "fracsync/core.hpp"

using namespace fracsync;

namespace {

template <typename Rhs>
Matrix3<double> central_difference(Rhs&& rhs, const State3& s, double step = 1e-6) {
  Matrix3<double> j;
  for (int c = 0; c < 3; ++c) {
    State3 plus = s, minus = s;
    plus(c) += step;
    minus(c) -= step;
    j.col(c) = (rhs(plus) - rhs(minus)) / (2.0 * step);
  }
  return j;
}

bool close(const State3& a, const State3& b, double tol = 1e-12) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

}  // namespace

TEST_CASE("fractional orders") {
  const FractionalOrders q(0.99);
  CHECK(q.commensurate());
  CHECK(q[2] == 0.99);
  CHECK_FALSE(FractionalOrders(0.9, 0.95, 0.9).commensurate());
  CHECK(FractionalOrders(0.9, 0.95, 0.9).max() == 0.95);
  CHECK(FractionalOrders(1.0).commensurate());
  CHECK_THROWS_AS(FractionalOrders(0.0), InvalidOrder);
  CHECK_THROWS_AS(FractionalOrders(0.5, 1.0001, 0.5), InvalidOrder);
  CHECK_THROWS_AS(FractionalOrders(-0.3), InvalidOrder);
  CHECK_THROWS_AS(FractionalOrders(std::nan("")), InvalidOrder);
  CHECK(q.repeated(2).size() == 6);
}

TEST_CASE("financial rhs") {
  const FinancialParams p{1.0, 0.1, 1.0};
  CHECK(close(financial_rhs(State3(0, 0, 0), p), State3(0, 1, 0)));
  CHECK(close(financial_rhs(State3(2, -1, 1), p), State3(-3, -2.9, -3)));
  CHECK(close(financial_rhs(State3(1, 1, 0), p), State3(0, -0.1, -1)));
}

TEST_CASE("volta rhs") {
  const VoltaParams p{19.0, 11.0, 0.73};
  CHECK(close(volta_rhs(State3(0, 0, 0), p), State3(0, 0, 1)));
  CHECK(close(volta_rhs(State3(8, 2, 3), p), State3(-52, -114, 19.19)));
  CHECK(close(volta_rhs(State3(1, 0, 0), p), State3(-1, -11, 1)));
}

TEST_CASE("analytic jacobians at known points") {
  Matrix3<double> expected;
  expected << -1, 0, 1, 0, -0.1, 0, -1, 0, -1;
  CHECK(financial_jacobian(State3(0, 0, 0), FinancialParams{1, 0.1, 1}).isApprox(expected));
  expected << -2, 2, 1, -4, -0.1, 0, -1, 0, -1;
  CHECK(financial_jacobian(State3(2, -1, 1), FinancialParams{1, 0.1, 1}).isApprox(expected));

  expected << -1, -19, 0, -11, -1, 0, 0, 0, 0.73;
  CHECK(volta_jacobian(State3(0, 0, 0), VoltaParams{19, 11, 0.73}).isApprox(expected));
  expected << -1, -22, -2, -14, -1, -8, 2, 8, 0.73;
  CHECK(volta_jacobian(State3(8, 2, 3), VoltaParams{19, 11, 0.73}).isApprox(expected));
}

TEST_CASE("jacobians match central differences on random states") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> state(-10.0, 10.0), param(-5.0, 20.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const State3 s(state(rng), state(rng), state(rng));
    const FinancialParams fp{param(rng), param(rng), param(rng)};
    const VoltaParams vp{param(rng), param(rng), param(rng)};

    const auto fd_f = central_difference([&](const State3& x) { return financial_rhs(x, fp); }, s);
    const auto fd_v = central_difference([&](const State3& x) { return volta_rhs(x, vp); }, s);
    const auto jf = financial_jacobian(s, fp);
    const auto jv = volta_jacobian(s, vp);
    // Both fields are quadratic, so central differences are exact up to rounding.
    CHECK((fd_f - jf).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, jf.cwiseAbs().maxCoeff()));
    CHECK((fd_v - jv).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, jv.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("rhs is generic over the scalar type") {
  const Vector3<long double> s(2, -1, 1);
  const FinancialParamsT<long double> p{1, 0.1L, 1};
  const auto d = financial_rhs(s, p);
  CHECK(static_cast<double>(d(1)) == doctest::Approx(-2.9).epsilon(1e-15));
}

TEST_CASE("financial equilibria") {
  SUBCASE("reference parameters") {
    const FinancialParams p{1.0, 0.1, 1.0};
    const auto eq = financial_equilibria(p);
    REQUIRE(eq.size() == 3);
    const double r = std::sqrt(0.8);
    CHECK(close(eq[0], State3(0, 10, 0)));
    CHECK(close(eq[1], State3(r, 2, -r)));
    CHECK(close(eq[2], State3(-r, 2, r)));
  }
  SUBCASE("only the x = 0 branch when 1 - beta(alpha + 1/gamma) < 0") {
    const auto eq = financial_equilibria(FinancialParams{1.0, 1.0, 1.0});
    REQUIRE(eq.size() == 1);
    CHECK(close(eq[0], State3(0, 1, 0)));
  }
  SUBCASE("degenerate parameters") {
    CHECK_THROWS_AS((void)financial_equilibria(FinancialParams{1.0, 0.0, 1.0}), DegenerateParameters);
    CHECK_THROWS_AS((void)financial_equilibria(FinancialParams{1.0, 0.1, 0.0}), DegenerateParameters);
  }
  SUBCASE("residual below 1e-12 for random parameters") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> alpha(-3.0, 5.0), beta(0.01, 1.0), gamma(0.2, 5.0);
    for (int trial = 0; trial < 500; ++trial) {
      const FinancialParams p{alpha(rng), beta(rng), gamma(rng)};
      for (const auto& s : financial_equilibria(p)) CHECK(financial_rhs(s, p).norm() < 1e-12);
    }
  }
}

TEST_CASE("system definitions dispatch to the right field and stay pure") {
  const auto fin = SystemDef::financial();
  const auto volta = SystemDef::volta();
  const State3 s(0.3, -1.2, 2.5);
  CHECK(fin.name() == "financial");
  CHECK(volta.name() == "volta");
  CHECK(fin.rhs(s) == financial_rhs(s, FinancialParams{}));
  CHECK(volta.jacobian(s) == volta_jacobian(s, VoltaParams{}));
  CHECK(SystemDef::zero().rhs(s) == State3::Zero());
  CHECK(fin.rhs(s) == fin.rhs(s));
}
