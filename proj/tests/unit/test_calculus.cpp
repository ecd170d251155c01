#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "psido/calculus.hpp"
#include "psido/errors.hpp"
#include "psido/grid.hpp"
#include "psido/quantize.hpp"

using namespace psido;

namespace {

const cplx I{0, 1};

GridField gaussian(int n, double L, double center, double width) {
  GridField u({n}, {L / n});
  for (int j = 0; j < n; ++j) {
    double x = j * L / n;
    u.values[j] = std::exp(-std::pow((x - center) / width, 2));
  }
  return u;
}

double rel_err(const GridField& a, const GridField& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  return std::sqrt(num / den);
}

Symbol bracket() { return Symbol(japanese({XI}), 1.0); }

}  // namespace

TEST(Compose, XiWithX) {
  auto e = compose(Symbol(var(XI), 1), Symbol(var(X), 0), 2);
  ASSERT_EQ(e.terms.size(), 2u);
  EXPECT_EQ(e.partial_sum().e, var(X) * var(XI) - Ex(I));
  EXPECT_EQ(compose_sum(Symbol(var(XI), 1), Symbol(var(X), 0), 1).e, var(X) * var(XI));
}

TEST(Compose, ConstantsAndMultipliers) {
  auto c = compose(Symbol(Ex(2.0), 0), Symbol(Ex(3.0), 0), 4);
  EXPECT_EQ(c.terms[0].e, Ex(6.0));
  for (int j = 1; j < 4; ++j) EXPECT_TRUE(c.terms[j].e.is_zero());
  auto b = compose(bracket(), bracket(), 3);
  for (int j = 1; j < 3; ++j) EXPECT_TRUE(b.terms[j].e.is_zero());
  EXPECT_NEAR(evaluate_at(b.terms[0].e, {0, 0, 0, 0, 3.0, 0}, 1).real(), 10.0, 1e-13);
  EXPECT_DOUBLE_EQ(b.terms[2].m, 0.0);
}

TEST(Compose, BudgetAndType) {
  Symbol a(var(XI) * sin(var(X)), 1);
  a.budget = 1;
  EXPECT_THROW(compose(a, a, 3), Error);
  Symbol bad = a;
  bad.delta = 1;
  EXPECT_THROW(compose(bad, bad, 1), Error);
}

TEST(Adjoint, Examples) {
  EXPECT_EQ(adjoint_sum(Symbol(var(XI), 1), 3).e, var(XI));
  EXPECT_EQ(adjoint_sum(Symbol(Ex(I) * var(X), 0), 3).e, Ex(-I) * var(X));
  EXPECT_EQ(adjoint_sum(Symbol(var(X) * var(XI), 1), 2).e, var(X) * var(XI) - Ex(I));
  Symbol a = bracket();
  EXPECT_EQ(adjoint_sum(a, 4).e, a.e);
  Symbol lim(var(XI) * var(X), 1);
  lim.budget = 3;
  EXPECT_THROW(adjoint(lim, 3), Error);
}

TEST(Quantize, TrivialActions) {
  const int n = 256;
  const double L = 2 * M_PI;
  GridField u({n}, {L / n});
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  for (auto& v : u.values) v = {nd(rng), nd(rng)};
  auto id = quantize_apply(Symbol(Ex(1.0), 0), u);
  EXPECT_LT(rel_err(id, u), 1e-12);
  auto xu = quantize_apply(Symbol(var(X), 0), u);
  for (int j = 0; j < n; ++j) EXPECT_LT(std::abs(xu.values[j] - j * L / n * u.values[j]), 1e-12);

  GridField w({n}, {L / n});
  for (int j = 0; j < n; ++j) w.values[j] = std::polar(1.0, 5.0 * j * L / n);
  auto kw = quantize_apply(Symbol(var(XI), 1), w);
  for (int j = 0; j < n; ++j) EXPECT_LT(std::abs(kw.values[j] - 5.0 * w.values[j]), 1e-10);
}

TEST(Quantize, MultiplierAgainstSpectralOracle) {
  const int n = 256;
  GridField u = gaussian(n, 20.0, 10.0, 1.0);
  Symbol a(pow(japanese({XI}), 2), 2);
  auto fast = quantize_apply(a, u);
  auto dense = quantize_apply(a, u, {1.0, QuantizePath::Dense});
  // (1 - d^2/dx^2) exp(-x^2) = (3 - 4 x^2) exp(-x^2) for the unit-width Gaussian.
  GridField oracle = u;
  for (int j = 0; j < n; ++j) {
    double x = j * 20.0 / n - 10.0;
    oracle.values[j] = (3 - 4 * x * x) * std::exp(-x * x);
  }
  EXPECT_LT(rel_err(fast, oracle), 1e-8);
  for (int j = 0; j < n; ++j) EXPECT_LT(std::abs(fast.values[j] - dense.values[j]), 1e-12);
}

TEST(Quantize, SeparableMatchesDense) {
  const int n = 128;
  GridField u = gaussian(n, 2 * M_PI, 3.0, 0.7);
  Symbol a((2.0 + sin(var(X))) * pow(japanese({XI}), 2) + cos(var(X)) * var(XI), 2);
  EXPECT_EQ(quantize_path(a), QuantizePath::Separable);
  auto s = quantize_apply(a, u);
  auto d = quantize_apply(a, u, {1.0, QuantizePath::Dense});
  EXPECT_LT(rel_err(s, d), 1e-12);
  Symbol mixed(join_abs(var(XI) * (1.0 + 0.2 * sin(var(X))), 1, 2), 0);
  EXPECT_EQ(quantize_path(mixed), QuantizePath::Dense);
}

TEST(Quantize, ComposedOperatorOnGaussian) {
  const int n = 256;
  const double L = 20;
  GridField u = gaussian(n, L, 10.0, 1.0);
  auto xu = quantize_apply(Symbol(var(X), 0), u);
  auto lhs = quantize_apply(Symbol(var(XI), 1), xu);
  auto rhs = quantize_apply(compose_sum(Symbol(var(XI), 1), Symbol(var(X), 0), 2), u);
  GridField oracle = u;
  for (int j = 0; j < n; ++j) {
    double x = j * L / n, s = x - 10;
    double g = std::exp(-s * s);
    oracle.values[j] = -I * (g + x * (-2 * s * g));
  }
  EXPECT_LT(rel_err(lhs, rhs), 1e-6);
  EXPECT_LT(rel_err(rhs, oracle), 1e-6);
}

TEST(Quantize, TwoAxisGrid) {
  const int nt = 16, nx = 32;
  GridField u({nt, nx}, {2 * M_PI / nt, 2 * M_PI / nx});
  for (int a = 0; a < nt; ++a)
    for (int b = 0; b < nx; ++b) u.values[a * nx + b] = std::polar(1.0, 3.0 * a * u.d[0] + 2.0 * b * u.d[1]);
  Symbol s(var(TAU) * var(TAU) - var(XI), 2, 1, true);
  auto r = quantize_apply(s, u);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_LT(std::abs(r.values[i] - 7.0 * u.values[i]), 1e-10);
  Symbol sx((1.0 + 0.5 * sin(var(X))) * var(TAU), 1, 1, true);
  auto d1 = quantize_apply(sx, u, {1.0, QuantizePath::Dense});
  for (int a = 0; a < nt; ++a)
    for (int b = 0; b < nx; ++b) {
      cplx want = (1.0 + 0.5 * std::sin(b * u.d[1])) * 3.0 * u.values[a * nx + b];
      EXPECT_LT(std::abs(d1.values[a * nx + b] - want), 1e-10);
    }
}

TEST(Quantize, OperatorMatrixMatchesApply) {
  const int n = 64;
  Symbol a(join_abs(var(XI) * (1.0 + 0.2 * sin(var(X))) / var(TAU), 0.3, 0.8) * var(XI), 1, 1, true);
  GridField u = gaussian(n, 2 * M_PI, 2.0, 0.5);
  auto M = operator_matrix(a, n, 2 * M_PI / n, 0, 1, 10.0);
  auto mv = M.apply(u.values);
  auto q = quantize_apply(a, u, {10.0});
  for (int j = 0; j < n; ++j) EXPECT_LT(std::abs(mv[j] - q.values[j]), 1e-11);
}

TEST(AsymptoticSum, Examples) {
  TruncatedExpansion single;
  single.terms = {bracket()};
  auto s = asymptotic_sum(single, std::vector<EpsNet>{EpsNet(EpsGrid({1.0}), {0.25})});
  EXPECT_DOUBLE_EQ(evaluate_at(s.e, {0, 0, 0, 0, 8.0, 0}, 1).real(), std::sqrt(65.0));
  EXPECT_DOUBLE_EQ(evaluate_at(s.e, {0, 0, 0, 0, 3.0, 0}, 1).real(), 0.0);

  TruncatedExpansion zero;
  zero.terms = {Symbol(Ex(0.0), 1), Symbol(Ex(0.0), 0)};
  EXPECT_TRUE(asymptotic_sum(zero).e.is_zero());

  TruncatedExpansion bad;
  bad.terms = {Symbol(Ex(1.0), 0), Symbol(Ex(1.0), 0)};
  EXPECT_THROW(asymptotic_sum(bad), Error);
}

TEST(AsymptoticSum, ResidualOrder) {
  TruncatedExpansion e;
  for (int j = 0; j < 6; ++j)
    e.terms.push_back(Symbol(Ex(std::ldexp(1.0, -j)) * pow(japanese({XI}), 1.0 - j), 1.0 - j));
  Symbol full = asymptotic_sum(e);
  for (std::size_t j = 1; j < e.excision_radii.size(); ++j)
    EXPECT_LE(e.excision_radii[j][0], e.excision_radii[j - 1][0]);
  Symbol diff = full.with(full.e - e.partial_sum(3).e, -2);
  OrderFitOptions o;
  o.rays = {PhasePoint{0, 0, 0, 0, 1, 0}, PhasePoint{0, 0, 0, 0, -1, 0}};
  for (double r = 256; r <= 8192; r *= 2) o.magnitudes.push_back(r);
  auto f = fit_order(diff, o);
  EXPECT_LE(f.slope, -2 + 0.3);
}

TEST(GridIo, RoundTrip) {
  GridField u({4, 8}, {0.5, 0.25}, 0.3, 1e-3);
  for (std::size_t i = 0; i < u.size(); ++i) u.values[i] = {double(i), -0.5 * i};
  std::string path = ::testing::TempDir() + "grid_rt.bin";
  write_grid(path, u);
  auto v = read_grid(path);
  EXPECT_TRUE(v.same_grid(u));
  EXPECT_EQ(v.values, u.values);
  EXPECT_DOUBLE_EQ(v.z, 0.3);
  EXPECT_DOUBLE_EQ(v.eps, 1e-3);
  std::remove(path.c_str());
  GridField bad({3}, {1.0});
  EXPECT_THROW(bad.validate(), Error);
}
