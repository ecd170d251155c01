#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include "psido/errors.hpp"
#include "psido/mollifier.hpp"
#include "psido/regularize.hpp"
#include "psido/scalenets.hpp"

using namespace psido;

namespace {

const double kPi = 3.14159265358979323846;

HolderModel sample_model(int nx, double L, double (*f)(double, double)) {
  HolderModel m;
  m.nx = nx;
  m.nz = 1;
  m.Lx = L;
  m.samples.resize(nx);
  for (int i = 0; i < nx; ++i) m.samples[i] = f(i * L / nx, L);
  m.lower = *std::min_element(m.samples.begin(), m.samples.end());
  m.upper = *std::max_element(m.samples.begin(), m.samples.end());
  return m;
}

}  // namespace

TEST(ClassifyNet, ReferenceNets) {
  auto g = EpsGrid::decades();
  EXPECT_EQ(classify_net(make_loglog_net(g)).cls, NetClass::Lsc);
  EXPECT_EQ(classify_net(make_const_net(g, 1.0)).cls, NetClass::Lsc);
  EXPECT_EQ(classify_net(make_power_net(g, -1.0)).cls, NetClass::ModerateNotSc);
  EXPECT_EQ(classify_net(make_power_net(g, 1.0)).cls, NetClass::Negligible);
  // log(1/eps) itself is slow scale but fails the p = 4 bound.
  std::vector<double> l;
  for (double e : g.values()) l.push_back(std::log(1 / e));
  EXPECT_EQ(classify_net(EpsNet(g, l)).cls, NetClass::ScNotLsc);
}

TEST(ClassifyNet, Errors) {
  EpsGrid short_grid({1e-2, 1e-3, 1e-4});
  try {
    classify_net(make_const_net(short_grid, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
  }
  auto g = EpsGrid::decades();
  std::vector<double> v(g.size(), 1.0);
  v[3] = std::nan("");
  try {
    classify_net(EpsNet(g, v));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
  EXPECT_THROW(EpsGrid({1e-2, 1e-2}), Error);
  EXPECT_THROW(EpsGrid({2.0, 1e-2}), Error);
}

TEST(EpsGridFile, RoundTrip) {
  auto g = EpsGrid::decades(2, 9);
  EXPECT_EQ(parse_eps_grid(format_eps_grid(g)), g);
}

TEST(Mollifier, MassAndMoments) {
  auto m = build_mollifier(6);
  EXPECT_NEAR(m.mass(), 1.0, 1e-10);
  for (int a = 1; a <= 6; ++a) EXPECT_LT(std::abs(m.moments[a]), 1e-8) << a;
  EXPECT_EQ(m.profile(0.7), 1.0);
  EXPECT_EQ(m.profile(-2.5), 0.0);
  EXPECT_DOUBLE_EQ(m.profile(1.5), 0.5);
  EXPECT_THROW(build_mollifier(1), Error);
}

TEST(Regularize, ConstantAndBandLimitedInputsPass) {
  auto g = EpsGrid::decades();
  auto phi = build_mollifier(2);
  auto c = sample_model(64, 2 * kPi, [](double, double) { return 3.25; });
  auto r = regularize(c, make_const_net(g, 2.0), phi, 1e-4);
  for (double v : r.samples) EXPECT_EQ(v, 3.25);
  auto cs = sample_model(64, 2 * kPi, [](double x, double) { return 2 + std::cos(x); });
  auto rc = regularize(cs, make_const_net(g, 2.0), phi, 1e-4);
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(rc.samples[i], cs.samples[i], 1e-12);
}

TEST(Regularize, RejectsNonLscScale) {
  auto g = EpsGrid::decades();
  auto phi = build_mollifier(2);
  auto c = sample_model(64, 2 * kPi, [](double x, double) { return 2 + std::cos(x); });
  EXPECT_THROW(regularize(c, make_power_net(g, -1.0), phi, 1e-4), Error);
  EXPECT_THROW(regularize(c, make_loglog_net(g), phi, 0.5), Error);
}

TEST(Regularize, AgreesWithSpatialQuadrature) {
  auto g = EpsGrid::decades();
  auto phi = build_mollifier(2);
  auto u = sample_model(256, 2 * kPi, [](double x, double) {
    return 1.0 + std::sqrt(std::abs(2 * std::sin(x / 2)));
  });
  auto w = make_loglog_net(g);
  for (double e : {1e-2, 1e-9}) {
    auto r = regularize(u, w, phi, e);
    for (int ix : {0, 17, 128}) {
      double q = regularize_by_quadrature(u, w.at(e), phi, ix);
      EXPECT_NEAR(r.samples[ix], q, 1e-10) << e << " " << ix;
    }
  }
}

TEST(Regularize, Linearity) {
  auto g = EpsGrid::decades();
  auto phi = build_mollifier(2);
  auto a = sample_model(128, 2 * kPi, [](double x, double) { return std::abs(std::sin(x)); });
  auto b = sample_model(128, 2 * kPi, [](double x, double) { return x < kPi ? 1.0 : 2.0; });
  HolderModel s = a;
  for (int i = 0; i < 128; ++i) s.samples[i] = 2 * a.samples[i] - 3 * b.samples[i];
  auto w = make_loglog_net(g);
  auto ra = regularize(a, w, phi, 1e-5), rb = regularize(b, w, phi, 1e-5), rs = regularize(s, w, phi, 1e-5);
  for (int i = 0; i < 128; ++i) EXPECT_NEAR(rs.samples[i], 2 * ra.samples[i] - 3 * rb.samples[i], 1e-12);
}

TEST(Regularize, BoundsAndPositivity) {
  auto g = EpsGrid::decades();
  auto phi = build_mollifier(2);
  auto u = sample_model(256, 2 * kPi, [](double x, double) {
    return 1.0 + std::sqrt(std::abs(2 * std::sin(x / 2)));
  });
  auto rep = regularization_report(u, make_loglog_net(g), phi);
  EXPECT_TRUE(rep.within_bounds);
  EXPECT_EQ(rep.eps_star, 1e-2);
}

TEST(Regularize, ZeroDataIsReported) {
  auto g = EpsGrid::decades();
  auto z = sample_model(64, 2 * kPi, [](double, double) { return 0.0; });
  auto rates = regularization_rates(z, make_loglog_net(g), build_mollifier(2));
  EXPECT_TRUE(rates.identically_zero);
}

TEST(HolderModelFile, RoundTrip) {
  auto u = sample_model(32, 10.0, [](double x, double) { return 1 + 0.1 * x; });
  u.mu = 0.5;
  std::string path = ::testing::TempDir() + "/model.holder";
  write_holder_model(path, u);
  auto v = read_holder_model(path);
  EXPECT_EQ(v.nx, 32);
  EXPECT_EQ(v.mu, 0.5);
  EXPECT_EQ(v.Lx, 10.0);
  EXPECT_EQ(v.samples, u.samples);
  std::remove(path.c_str());
}
