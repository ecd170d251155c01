#include "psido/factorize.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "psido/errors.hpp"

namespace psido {

namespace {

constexpr cplx I(0.0, 1.0);

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

Symbol lateral(const Ex& e, double m) { return Symbol(e, m, 1, true); }

EpsGrid model_grid(const WaveModel& m) { return m.grid ? *m.grid : EpsGrid({1.0}); }

// Rays tau > 0 across the full (tau, xi) half plane at a few x, z.
std::vector<PhasePoint> region_samples(int nx, int nu) {
  std::vector<PhasePoint> pts;
  for (int ix = 0; ix < nx; ++ix)
    for (double z : {0.0, 0.5})
      for (int iu = 0; iu < nu; ++iu)
        for (double r = 1; r <= 512; r *= 2) {
          double u = -1.0 + 2.0 * iu / (nu - 1);
          PhasePoint p{};
          p[X] = 2 * std::numbers::pi * ix / nx;
          p[Z] = z;
          p[TAU] = r / std::sqrt(1 + u * u);
          p[XI] = r * u / std::sqrt(1 + u * u);
          pts.push_back(p);
        }
  return pts;
}

}  // namespace

const char* branch_name(Branch b) { return b == Branch::RootMinus ? "root-minus" : "root-plus"; }

Branch branch_from_name(const std::string& s) {
  if (s == "root-minus") return Branch::RootMinus;
  if (s == "root-plus") return Branch::RootPlus;
  fail(ErrorKind::InvalidInput, "unknown branch '" + s + "'");
}

Ex extended_square(const WaveModel& m, const CutoffAngles& angles) {
  angles.validate();
  const double s2 = std::sin(rad(angles.gamma2));
  Ex f = var(XI) * pow(m.inv_c2, -0.5) / var(TAU);
  Ex chi2 = join_abs(f, s2, 0.5 * (1 + s2));
  return pow(var(TAU), 2) * m.inv_c2 - pow(var(XI), 2) * (Ex(2.0) * chi2 - Ex(1.0));
}

Ex extended_root(const WaveModel& m, const CutoffAngles& angles) { return sqrt(extended_square(m, angles)); }

Symbol principal_root(const WaveModel& m, const CutoffAngles& angles) {
  Symbol a = wave_symbol(m);
  auto region = PhaseRegion::cone(rad(angles.theta1), m.speed());
  EllipticityOptions eo;
  eo.m = 2;
  auto rep = ellipticity_probe(a, region, region_samples(16, 33), model_grid(m), eo);
  require(rep.elliptic, ErrorKind::Ellipticity, "wave symbol is not elliptic on " + rep.region);
  Symbol chi = build_chi(angles, m.speed());
  return lateral(chi.e * extended_root(m, angles), 1.0);
}

namespace {

// |a0| <zeta>^-m must stay away from zero where psi(zeta / r) is switched on.
void check_invertible(const Graded& a, const Ex& radius, double eps) {
  const double r = std::abs(evaluate_at(radius, PhasePoint{}, eps));
  const auto fv = a.base.freq_vars();
  Points p;
  p.eps = eps;
  for (int ix = 0; ix < 32; ++ix)
    for (int ia = 0; ia < 16; ++ia)
      for (double k : {2.0, 8.0, 64.0}) {
        double phi = fv.size() > 1 ? (ia + 0.5) * std::numbers::pi / 16 : (ia < 8 ? 0.0 : std::numbers::pi);
        p.c[X].push_back(2 * std::numbers::pi * ix / 32);
        p.c[TAU].push_back(fv.size() > 1 ? k * r * std::sin(phi) : 0.0);
        p.c[XI].push_back(k * r * std::cos(phi));
      }
  for (int v : {Y, Z, ETA}) p.c[v] = {0.0};
  auto vals = evaluate(a.g[0], p);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    double z2 = 1 + p.c[TAU][i] * p.c[TAU][i] + p.c[XI][i] * p.c[XI][i];
    require(std::abs(vals[i]) * std::pow(z2, -a.base.m / 2) > 1e-12, ErrorKind::Ellipticity,
            "principal symbol vanishes where the parametrix is switched on");
  }
}

}  // namespace

Graded parametrix(const Graded& a, int N, const Ex& radius, double eps) {
  require(N >= 1, ErrorKind::InvalidInput, "parametrix needs N >= 1");
  require(N <= a.base.budget, ErrorKind::Budget, "parametrix depth exceeds the derivative budget");
  check_invertible(a, radius, eps);
  const auto fv = a.base.freq_vars();
  Ex psi = excision_profile(fv, pow(radius, -1.0));
  Ex inv0 = psi / a.g[0];
  Graded p(a.base.with(inv0, -a.base.m), N);
  for (int k = 1; k < N; ++k) {
    std::vector<Ex> parts;
    for (int i = 0; i < k; ++i) {
      Symbol pi = p.grade(i);
      for (int j = 0; i + j <= k && j < a.depth(); ++j) {
        if (a.g[j].is_zero()) continue;
        Symbol aj = a.grade(j);
        parts.push_back(compose_term(pi, aj, k - i - j));
      }
    }
    p.g[k] = Ex(-1.0) * sum(parts) * inv0;
  }
  p.base.e = p.g[0];
  return p;
}

TruncatedExpansion parametrix(const Symbol& a, int N, const Ex& radius, double eps) {
  Graded p = parametrix(Graded(a), N, radius, eps);
  TruncatedExpansion t;
  for (int k = 0; k < N; ++k) t.terms.push_back(p.grade(k));
  t.truncation = N;
  return t;
}

LotSolution solve_lot_system(const Ex& g1, const Ex& g2, const Ex& a1, const Ex& a2, const Ex& rho) {
  Ex scale = Ex(-1.0) * rho / (a1 - a2);
  return {scale * (a1 * g1 - g2), scale * (g2 - a2 * g1)};
}

void check_separation(const Ex& a1, const Ex& a2, const std::vector<PhasePoint>& pts, double eps, double min_sep) {
  Points p;
  p.eps = eps;
  for (auto& q : pts)
    for (int v = 0; v < kNumVars; ++v) p.c[v].push_back(q[v]);
  auto d = evaluate(a1 - a2, p);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double r = std::hypot(pts[i][TAU], pts[i][XI]);
    if (!(std::abs(d[i]) >= min_sep * r)) {
      std::ostringstream os;
      os << "characteristic roots are not separated at tau=" << pts[i][TAU] << " xi=" << pts[i][XI]
         << " (|a1-a2|=" << std::abs(d[i]) << ")";
      fail(ErrorKind::Degenerate, os.str());
    }
  }
}

Graded operator_symbol(const WaveModel& m, const CutoffAngles& angles) {
  Graded a(lateral(m.inv_rho * extended_square(m, angles), 2.0), 2);
  a.g[1] = I * var(XI) * diff(m.inv_rho, X);
  return a;
}

namespace {

struct Residuals {
  Graded g1, g2;
};

// Coefficients of (d_z + A1) q (d_z + A2) - L: g1 multiplies d_z, g2 is the rest.
Residuals residuals(const Graded& a1, const Graded& a2, const Graded& q, const Graded& l, int depth) {
  Graded qa2 = q.base.e * a2;
  Residuals r;
  r.g1 = graded_compose(a1, q, depth) + qa2.truncated(depth);
  r.g2 = graded_diff(qa2, Z).retopped(2.0).truncated(depth) + graded_compose(a1, qa2, depth) - l.truncated(depth);
  return r;
}

}  // namespace

FactorizationResult factorize_L(const WaveModel& m, const FactorizeOptions& opt) {
  require(opt.N >= 1, ErrorKind::InvalidInput, "truncation N must be >= 1");
  principal_root(m, opt.angles);
  require(opt.N + 2 <= Symbol().budget, ErrorKind::Budget, "truncation exceeds the derivative budget");
  Ex b = extended_root(m, opt.angles);
  const double sgn = opt.branch == Branch::RootMinus ? 1.0 : -1.0;
  Ex r1 = Ex(-sgn) * I * b, r2 = Ex(sgn) * I * b;
  check_separation(r1, r2, region_samples(8, 9), m.sample_eps(), 1e-3);

  Graded a1(lateral(r1, 1.0), 1), a2(lateral(r2, 1.0), 1);
  Graded q(lateral(m.inv_rho, 0.0), 1);
  Graded l = operator_symbol(m, opt.angles);
  Ex rho = m.rho();
  for (int k = 1; k < opt.N; ++k) {
    Residuals r = residuals(a1, a2, q, l, k + 1);
    LotSolution s = solve_lot_system(r.g1.g[k], r.g2.g[k], r1, r2, rho);
    a1.g.push_back(s.b1);
    a2.g.push_back(s.b2);
  }
  FactorizationResult out;
  Residuals r = residuals(a1, a2, q, l, opt.N + 2);
  out.a1 = a1;
  out.a2 = a2;
  out.gamma1 = r.g1;
  out.gamma2 = r.g2;
  out.N = opt.N;
  out.branch = opt.branch;
  out.angles = opt.angles;
  out.model = m.name;
  return out;
}

ZerothOrderReference zeroth_order_reference(const WaveModel& m, const CutoffAngles& angles) {
  Ex b = extended_root(m, angles);
  Ex a = extended_square(m, angles);
  Ex rho = m.rho();
  Ex arho = a * m.inv_rho;
  Ex depth_term = Ex(0.25) * (diff(arho, Z) / arho - diff(rho, Z) / rho);
  Ex cross = diff(b, XI) * diff(b, X) / (Ex(2.0) * b);
  Ex density_term = Ex(0.5) * var(XI) * diff(rho, X) / (rho * b);
  return {Ex(-1.0) * I * b + cross - depth_term + density_term, I * b - cross - depth_term - density_term};
}

}  // namespace psido
