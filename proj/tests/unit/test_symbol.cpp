#include <gtest/gtest.h>

#include <cmath>

#include "psido/errors.hpp"
#include "psido/symbol.hpp"

using namespace psido;

namespace {

Symbol bracket_sq() { return Symbol(1.0 + pow(var(XI), 2), 2.0); }

}  // namespace

TEST(Symbol, DerivativeOfRootAtReferencePoint) {
  Symbol b(sqrt(pow(var(TAU), 2) - pow(var(XI), 2)), 1.0, 1, true);
  auto v = eval_with_derivs(b, mi({{XI, 1}}), {0, 0, 0, 2.0, 1.0, 0}, 1.0);
  EXPECT_FALSE(v.finite_difference);
  EXPECT_NEAR(v.value.real(), -1.0 / std::sqrt(3.0), 1e-14);
  auto fd = eval_with_derivs(b, mi({{XI, 1}}), {0, 0, 0, 2.0, 1.0, 0}, 1.0, {0, true});
  EXPECT_TRUE(fd.finite_difference);
  EXPECT_NEAR(fd.value.real(), -1.0 / std::sqrt(3.0), 1e-10);
}

TEST(Symbol, BudgetIsEnforced) {
  Symbol s = bracket_sq();
  s.budget = 2;
  try {
    derivative(s, mi({{XI, 3}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Budget);
  }
}

TEST(Symbol, OrderBookkeeping) {
  Symbol s(sin(var(X)) * pow(1.0 + pow(var(XI), 2), 1.5), 3.0);
  s.rho = 0.8;
  s.delta = 0.1;
  Symbol d = derivative(s, mi({{XI, 2}, {X, 1}}));
  EXPECT_DOUBLE_EQ(d.m, 3.0 - 1.6 + 0.1);
}

TEST(Symbol, SeminormOfQuotient) {
  Symbol s(pow(var(XI), 2) / japanese({XI}), 1.0);
  SampleBox box;
  box.axis(XI, -100, 100, 201);
  double n = seminorm(s, {}, box, 1.0);
  EXPECT_GT(n, 0.99);
  EXPECT_LE(n, 1.0);
}

TEST(Symbol, SampleBoxNeedsEightPoints) {
  SampleBox box;
  box.axis(XI, 0, 1, 4);
  EXPECT_THROW(box.points(1.0), Error);
}

TEST(Symbol, FitOrderRecoversPolynomialGrowth) {
  OrderFitOptions o;
  o.rays = {PhasePoint{0, 0, 0, 0, 1, 0}, PhasePoint{0, 0, 0, 0, -1, 0}};
  for (double r = 16; r <= 1024; r *= 2) o.magnitudes.push_back(r);
  o.bases = {PhasePoint{}};
  auto f = fit_order(bracket_sq(), o);
  EXPECT_NEAR(f.slope, 2.0, 0.05);
  auto fz = fit_order(Symbol(Ex(0.0), 0.0), o);
  EXPECT_TRUE(fz.identically_zero);
  o.magnitudes = {16, 32, 64};
  EXPECT_THROW(fit_order(bracket_sq(), o), Error);
}

TEST(Symbol, FitOrderPrefactorNet) {
  auto g = EpsGrid::decades();
  auto w = std::make_shared<EpsNet>(make_loglog_net(g));
  Symbol s(net(w) * japanese({XI}), 1.0);
  OrderFitOptions o;
  o.rays = {PhasePoint{0, 0, 0, 0, 1, 0}};
  for (double r = 16; r <= 1024; r *= 2) o.magnitudes.push_back(r);
  o.prefactor_grid = g;
  auto f = fit_order(s, o);
  EXPECT_NEAR(f.slope, 1.0, 1e-6);
  EXPECT_EQ(f.prefactor_class, NetClass::Lsc);
}

TEST(Symbol, PointValueOfBracket) {
  auto g = EpsGrid::decades();
  GeneralizedPoint p;
  p.freq_vars = {XI};
  p.freq = {make_loglog_net(g)};
  auto v = point_value(bracket_sq(), p);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double w = p.freq[0][i];
    EXPECT_NEAR(v.values[i].real(), 1 + w * w, 1e-13);
  }
  EXPECT_EQ(v.cls, NetClass::Lsc);
  // Equivalent nets (difference eps^3) give a negligible difference.
  auto q = p;
  std::vector<double> shifted;
  for (std::size_t i = 0; i < g.size(); ++i) shifted.push_back(p.freq[0][i] + std::pow(g[i], 3));
  q.freq = {EpsNet(g, shifted)};
  EXPECT_EQ(difference_class(v, point_value(bracket_sq(), q)), NetClass::Negligible);
}

TEST(Symbol, LinearityAndLeibniz) {
  Ex a = sin(var(X)) * japanese({XI});
  Ex b = exp(cos(var(X))) * pow(1.0 + pow(var(XI), 2), -0.5);
  PhasePoint p{0.7, 0, 0, 0, 3.5, 0};
  MultiIndex al = mi({{XI, 1}, {X, 1}});
  Symbol lin(2.0 * a - 3.0 * b, 1);
  cplx lhs = eval_with_derivs(lin, al, p, 1).value;
  cplx rhs = 2.0 * eval_with_derivs(Symbol(a, 1), al, p, 1).value -
             3.0 * eval_with_derivs(Symbol(b, -1), al, p, 1).value;
  EXPECT_LT(std::abs(lhs - rhs), 1e-12);
  // d_x (a b) = a_x b + a b_x
  cplx prod = evaluate_at(diff(a * b, X), p, 1);
  cplx leib = evaluate_at(diff(a, X), p, 1) * evaluate_at(b, p, 1) +
              evaluate_at(a, p, 1) * evaluate_at(diff(b, X), p, 1);
  EXPECT_LT(std::abs(prod - leib), 1e-10);
}

TEST(Symbol, ExcisionVanishesNearOrigin) {
  Symbol s = excise_origin(Symbol(pow(var(XI), -2), -2), 1.0);
  EXPECT_EQ(evaluate_at(s.e, {0, 0, 0, 0, 0.0, 0}, 1), cplx(0.0));
  EXPECT_EQ(evaluate_at(s.e, {0, 0, 0, 0, 0.3, 0}, 1), cplx(0.0));
  EXPECT_DOUBLE_EQ(evaluate_at(s.e, {0, 0, 0, 0, 2.0, 0}, 1).real(), 0.25);
}

TEST(Symbol, SerializationKeepsMetadata) {
  Symbol s(var(X) * var(XI), 1.0, 1, true);
  s.rho = 0.9;
  s.budget = 5;
  auto t = deserialize_symbol(serialize_symbol(s));
  EXPECT_EQ(t.e, s.e);
  EXPECT_EQ(t.rho, 0.9);
  EXPECT_EQ(t.budget, 5);
  EXPECT_TRUE(t.has_tau);
}
