#include <gtest/gtest.h>

#include <cmath>

#include "psido/eval.hpp"
#include "psido/expr.hpp"
#include "psido/profiles.hpp"

using namespace psido;

TEST(Expr, InterningGivesStructuralEquality) {
  Ex a = var(X) * var(XI) + 1.0;
  Ex b = 1.0 + var(XI) * var(X);
  EXPECT_EQ(a, b);
  EXPECT_TRUE((var(X) - var(X)).is_zero());
  EXPECT_EQ(var(XI) * var(XI), pow(var(XI), 2));
  EXPECT_EQ(sqrt(var(XI)) * sqrt(var(XI)), var(XI));
}

TEST(Expr, StructuralDerivatives) {
  EXPECT_EQ(diff(var(XI), XI), Ex(1.0));
  EXPECT_TRUE(diff(var(XI), X).is_zero());
  Ex s = sin(var(X)) * var(XI);
  EXPECT_EQ(diff(s, X), cos(var(X)) * var(XI));
  EXPECT_EQ(diff(s, X, 2), -(sin(var(X)) * var(XI)));
}

TEST(Expr, DerivativeOfSqrtMatchesClosedForm) {
  // d/dxi sqrt(tau^2 - xi^2) at (tau, xi) = (2, 1) is -1/sqrt(3).
  Ex b = sqrt(pow(var(TAU), 2) - pow(var(XI), 2));
  cplx v = evaluate_at(diff(b, XI), {0, 0, 0, 2.0, 1.0, 0}, 1.0);
  EXPECT_NEAR(v.real(), -1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(v.imag(), 0.0);
}

TEST(Expr, ConjugationIsStructural) {
  Ex a = cplx(0, 1) * var(X);
  EXPECT_EQ(conj(a), -a);
  Ex r = var(X) * var(XI);
  EXPECT_EQ(conj(r), r);
}

TEST(Expr, SerializationRoundTrip) {
  auto n = std::make_shared<EpsNet>(make_loglog_net(EpsGrid::decades()));
  Ex e = join_abs(var(XI) / var(TAU), 0.5, 0.8) * sqrt(1.0 + pow(var(XI), 2)) * net(n) +
         cplx(0.25, -1.5) * sin(var(X));
  std::string s = serialize(e);
  EXPECT_EQ(s.rfind("SYM v1", 0), 0u);
  Ex back = deserialize(s);
  EXPECT_EQ(serialize(back), s);
  std::array<double, kNumVars> p{0.3, 0, 0, 2.0, 0.7, 0};
  EXPECT_EQ(evaluate_at(back, p, 1e-3), evaluate_at(e, p, 1e-3));
}

TEST(Expr, MaskedProductSuppressesNonFinite) {
  // Outside the join support the product is exactly zero even where the
  // companion factor is not finite.
  Ex e = join_abs(var(XI), 0.5, 1.0) * sqrt(var(X) - 2.0) / var(TAU);
  Points p;
  p.set(XI, std::vector<double>{2.0, 0.2});
  p.set(X, 0.0);
  p.set(TAU, 0.0);
  auto v = evaluate(e, p);
  EXPECT_EQ(v[0], cplx(0.0));
  EXPECT_FALSE(std::isfinite(std::abs(v[1])));
}

TEST(Profiles, JoinValuesAndSymmetry) {
  EXPECT_EQ(join(0.9, 1, 2), 1.0);
  EXPECT_EQ(join(2.0, 1, 2), 0.0);
  EXPECT_DOUBLE_EQ(join(1.5, 1, 2), 0.5);
  EXPECT_DOUBLE_EQ(join_abs_deriv(-1.3, 1, 2, 0), join_abs_deriv(1.3, 1, 2, 0));
  EXPECT_DOUBLE_EQ(join_abs_deriv(-1.3, 1, 2, 1), -join_abs_deriv(1.3, 1, 2, 1));
}

TEST(Profiles, JoinDerivativesMatchDifferences) {
  // Taylor coefficients against 4th-order central differences of the value.
  for (double s : {1.1, 1.4, 1.5, 1.75, 1.93}) {
    for (int n = 1; n <= 3; ++n) {
      auto f = [&](double t) { return join_abs_deriv(t, 1, 2, n - 1); };
      auto D = [&](double h) {
        return (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (12 * h);
      };
      double fd = (16 * D(5e-4) - D(1e-3)) / 15;
      EXPECT_NEAR(join_abs_deriv(s, 1, 2, n), fd, 1e-6 * (1 + std::abs(fd))) << s << " " << n;
    }
  }
}
