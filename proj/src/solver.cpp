#include "psido/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "psido/errors.hpp"
#include "psido/fft.hpp"

namespace psido {

namespace {

constexpr cplx I(0.0, 1.0);

// (iA - B) frozen at one depth.
struct Generator {
  enum class Kind { Diagonal, Dense, Generic } kind = Kind::Diagonal;
  std::vector<cplx> diag;  // Fourier multipliers
  OperatorMatrix dense;
  std::function<std::vector<cplx>(const std::vector<cplx>&)> generic;

  std::vector<cplx> apply(const std::vector<cplx>& u) const {
    switch (kind) {
      case Kind::Diagonal: {
        std::vector<cplx> w = u;
        fft_forward(w, {int(w.size())});
        for (std::size_t k = 0; k < w.size(); ++k) w[k] *= diag[k] / double(w.size());
        fft_backward(w, {int(w.size())});
        return w;
      }
      case Kind::Dense:
        return dense.apply(u);
      default:
        return generic(u);
    }
  }
};

bool depth_dependent(const CauchyProblem& p) {
  return p.A.e.depends_on(Z) || (p.B && p.B->e.depends_on(Z));
}

std::vector<cplx> multiplier_values(const Symbol& a, const GridField& g, double z, double eps, double tau) {
  Points pts;
  pts.eps = eps;
  pts.set(TAU, tau);
  pts.set(Z, z);
  pts.set(X, 0.0);
  pts.set(XI, g.frequencies(0));
  auto v = evaluate(a.e, pts);
  if (v.size() == 1) v.assign(g.nx(), v[0]);
  return v;
}

OperatorMatrix hermitian_part(const OperatorMatrix& m) {
  OperatorMatrix h = m.adjoint();
  for (std::size_t i = 0; i < h.m.size(); ++i) h.m[i] = 0.5 * (h.m[i] + m.m[i]);
  return h;
}

Generator build_generator(const CauchyProblem& p, double z, double eps) {
  const GridField& g = p.u0;
  Generator G;
  auto pa = quantize_path(p.A);
  auto pb = p.B ? quantize_path(*p.B) : QuantizePath::Multiplier;
  if (pa == QuantizePath::Multiplier && pb == QuantizePath::Multiplier) {
    G.kind = Generator::Kind::Diagonal;
    auto a = multiplier_values(p.A, g, z, eps, p.tau);
    std::vector<cplx> b(a.size(), 0.0);
    if (p.B) b = multiplier_values(*p.B, g, z, eps, p.tau);
    G.diag.resize(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      cplx ak = p.hermitian ? cplx(a[k].real()) : a[k];
      cplx bk = p.hermitian ? cplx(b[k].real()) : b[k];
      G.diag[k] = I * ak - bk;
    }
    return G;
  }
  if (!p.hermitian && pa != QuantizePath::Dense && pb != QuantizePath::Dense) {
    G.kind = Generator::Kind::Generic;
    G.generic = [&p, z, eps](const std::vector<cplx>& u) {
      GridField f({p.u0.nx()}, {p.u0.dx()}, z, eps);
      f.values = u;
      QuantizeOptions q;
      q.tau = p.tau;
      auto au = quantize_apply(p.A, f, q).values;
      std::vector<cplx> out(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) out[i] = I * au[i];
      if (p.B) {
        auto bu = quantize_apply(*p.B, f, q).values;
        for (std::size_t i = 0; i < u.size(); ++i) out[i] -= bu[i];
      }
      return out;
    };
    return G;
  }
  G.kind = Generator::Kind::Dense;
  OperatorMatrix a = operator_matrix(p.A, g.nx(), g.dx(), z, eps, p.tau);
  if (p.hermitian) a = hermitian_part(a);
  for (auto& v : a.m) v *= I;
  if (p.B) {
    OperatorMatrix b = operator_matrix(*p.B, g.nx(), g.dx(), z, eps, p.tau);
    if (p.hermitian) b = hermitian_part(b);
    for (std::size_t i = 0; i < a.m.size(); ++i) a.m[i] -= b.m[i];
  }
  G.dense = std::move(a);
  return G;
}

double symbol_sup(const CauchyProblem& p, double eps) {
  const GridField& g = p.u0;
  Points pts;
  pts.eps = eps;
  pts.set(TAU, p.tau);
  pts.set(Z, 0.0);
  const auto xi = g.frequencies(0);
  const auto xs = g.coords(0);
  std::vector<double> px, pk;
  const int stride = std::max(1, g.nx() / 32);
  for (int j = 0; j < g.nx(); j += stride)
    for (double k : xi) {
      px.push_back(xs[j]);
      pk.push_back(k);
    }
  pts.set(X, px);
  pts.set(XI, pk);
  Ex gen = I * p.A.e;
  if (p.B) gen = gen - p.B->e;
  double best = 0;
  for (auto& v : evaluate(gen, pts)) best = std::max(best, std::abs(v));
  return best;
}

std::vector<cplx> forcing_at(const CauchyProblem& p, double z) {
  if (p.forcing.empty()) return {};
  const auto& f = p.forcing;
  if (z <= f.front().z) return f.front().values;
  if (z >= f.back().z) return f.back().values;
  std::size_t k = 1;
  while (f[k].z < z) ++k;
  const double w = (z - f[k - 1].z) / (f[k].z - f[k - 1].z);
  std::vector<cplx> out(f[k].values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1 - w) * f[k - 1].values[i] + w * f[k].values[i];
  return out;
}

double vec_norm(const std::vector<cplx>& v, double dx) {
  double s = 0;
  for (auto& c : v) s += std::norm(c);
  return std::sqrt(s * dx);
}

// Zero the Fourier modes with |k| > band.
void band_limit(std::vector<cplx>& v, int band) {
  const int n = int(v.size());
  fft_forward(v, {n});
  for (int k = 0; k < n; ++k)
    if (std::abs(fft_index(k, n)) > band) v[k] = 0;
    else v[k] /= double(n);
  fft_backward(v, {n});
}

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// Minimizes <Hv, v> / <v, v> over band-limited v, H the Hermitian part of M, by
// Rayleigh-Ritz on span{v, residual}. Grid weights cancel in the quotient.
double rayleigh_ritz(const OperatorMatrix& M, std::vector<cplx> v, int band, int steps) {
  const OperatorMatrix Mh = M.adjoint();
  auto H = [&](const std::vector<cplx>& x) {
    auto a = M.apply(x), b = Mh.apply(x);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.5 * (a[i] + b[i]);
    return a;
  };
  auto normalize = [](std::vector<cplx>& x) {
    double nn = std::sqrt(dot(x, x).real());
    for (auto& c : x) c /= nn;
    return nn;
  };
  band_limit(v, band);
  normalize(v);
  auto Hv = H(v);
  double rho = dot(v, Hv).real();
  for (int it = 0; it < steps; ++it) {
    std::vector<cplx> r(v.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = Hv[i] - rho * v[i];
    band_limit(r, band);
    cplx proj = dot(v, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= proj * v[i];
    if (std::sqrt(dot(r, r).real()) < 1e-12 * (1 + std::abs(rho))) break;
    normalize(r);
    auto Hr = H(r);
    const double a = rho, d = dot(r, Hr).real();
    const cplx b = dot(v, Hr);
    // smallest eigenpair of [[a, b], [conj b, d]]
    const double mid = 0.5 * (a + d), rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
    const double lo = mid - rad;
    cplx cv = -b, cr = a - lo;
    if (std::abs(cv) + std::abs(cr) < 1e-300) break;
    if (std::abs(a - lo) < 1e-14 * (1 + std::abs(a)) && std::abs(b) < 1e-300) {
      cv = 1;
      cr = 0;
    }
    std::vector<cplx> w(v.size()), Hw(v.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = cv * v[i] + cr * r[i];
      Hw[i] = cv * Hv[i] + cr * Hr[i];
    }
    double nn = normalize(w);
    for (auto& c : Hw) c /= nn;
    const double next = dot(w, Hw).real();
    if (next >= rho - 1e-15 * (1 + std::abs(rho))) break;
    v.swap(w);
    Hv.swap(Hw);
    rho = next;
  }
  return rho;
}

}  // namespace

void CauchyProblem::validate() const {
  u0.validate();
  require(u0.ndim() == 1, ErrorKind::InvalidInput, "the depth stepper works on one x axis");
  require(A.n_lat == 1, ErrorKind::InvalidInput, "one lateral axis only");
  require(gamma > 0 && 2 * gamma < L, ErrorKind::InvalidInput, "need 0 < gamma and 2 gamma < L");
  require(Z > 0, ErrorKind::InvalidInput, "depth range must be positive");
  for (double s : sobolev) require(std::abs(s) <= 4, ErrorKind::InvalidInput, "Sobolev orders are limited to |s| <= 4");
  for (std::size_t k = 0; k < forcing.size(); ++k) {
    require(forcing[k].same_grid(u0), ErrorKind::InvalidInput, "forcing and initial field use different grids");
    if (k) require(forcing[k].z > forcing[k - 1].z, ErrorKind::InvalidInput, "forcing slices must increase in depth");
  }
}

double energy_norm(const GridField& u, double s) {
  require(std::abs(s) <= 4, ErrorKind::InvalidInput, "Sobolev orders are limited to |s| <= 4");
  std::vector<cplx> w = u.values;
  fft_forward(w, u.n);
  const auto xi = u.frequencies(u.ndim() - 1);
  const int nx = u.nx();
  double vol = 1;
  for (double d : u.d) vol *= d;
  double acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double k = xi[i % nx];
    acc += std::pow(1 + k * k, s) * std::norm(w[i]);
  }
  return std::sqrt(acc * vol / double(w.size()));
}

SolveResult solve_cauchy(const CauchyProblem& p, double eps, double lambda) {
  p.validate();
  SolveResult r;
  const double sup = symbol_sup(p, eps);
  r.stable_dz = sup > 0 ? 2.8 / sup : p.Z;
  double dz = p.dz > 0 ? p.dz : r.stable_dz / 4;
  int steps = std::max(1, int(std::ceil(p.Z / dz - 1e-9)));
  dz = p.Z / steps;
  r.dz = dz;
  r.steps = steps;

  const bool zdep = depth_dependent(p);
  Generator G;
  if (!zdep) G = build_generator(p, 0.0, eps);

  EnergyTrace& t = r.trace;
  t.eps = eps;
  t.lambda = lambda;
  t.s = p.sobolev;
  t.norm.assign(p.sobolev.size(), {});
  t.pnorm.assign(p.sobolev.size(), {});
  GridField work = p.u0;
  work.eps = eps;
  auto record = [&](double z) {
    t.z.push_back(z);
    work.z = z;
    auto f = forcing_at(p, z);
    GridField fz = work;
    if (f.empty())
      std::fill(fz.values.begin(), fz.values.end(), cplx(0.0));
    else
      fz.values = f;
    for (std::size_t i = 0; i < p.sobolev.size(); ++i) {
      t.norm[i].push_back(energy_norm(work, p.sobolev[i]));
      t.pnorm[i].push_back(energy_norm(fz, p.sobolev[i]));
    }
  };
  std::vector<double> snaps = p.snapshot_depths;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto snapshot = [&](double z) {
    while (next_snap < snaps.size() && snaps[next_snap] <= z + 0.5 * dz) {
      GridField s = work;
      s.z = z;
      r.snapshots.push_back(s);
      ++next_snap;
    }
  };
  record(0.0);
  snapshot(0.0);
  const double dx = p.u0.dx();
  auto& u = work.values;
  const std::size_t n = u.size();
  for (int step = 0; step < steps; ++step) {
    const double z = step * dz;
    if (zdep) G = build_generator(p, z + 0.5 * dz, eps);
    auto rhs = [&](const std::vector<cplx>& v, double zz) {
      auto out = G.apply(v);
      auto f = forcing_at(p, zz);
      if (!f.empty())
        for (std::size_t i = 0; i < n; ++i) out[i] += f[i];
      return out;
    };
    const double before = vec_norm(u, dx);
    auto k1 = rhs(u, z);
    std::vector<cplx> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dz * k1[i];
    auto k2 = rhs(tmp, z + 0.5 * dz);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dz * k2[i];
    auto k3 = rhs(tmp, z + 0.5 * dz);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = u[i] + dz * k3[i];
    auto k4 = rhs(tmp, z + dz);
    for (std::size_t i = 0; i < n; ++i) u[i] += dz / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    const double after = vec_norm(u, dx);
    if (!std::isfinite(after) || (before > 0 && after > 10 * before)) {
      std::ostringstream os;
      os << "instability at z=" << z + dz << ": norm grew from " << before << " to " << after << " (dz=" << dz
         << ", stable bound " << r.stable_dz << ")";
      fail(ErrorKind::Numeric, os.str());
    }
    record(z + dz);
    snapshot(z + dz);
  }
  work.z = p.Z;
  r.u = work;
  return r;
}

EstimateMargin check_energy_estimate(const EnergyTrace& t, double s, double p, double lambda) {
  require(t.z.size() >= 17, ErrorKind::InsufficientData, "energy trace needs at least 16 steps");
  require(p >= 1, ErrorKind::InvalidInput, "estimate exponent p must be >= 1");
  require(lambda > 0, ErrorKind::InvalidInput, "lambda must be positive");
  std::size_t is = t.s.size();
  for (std::size_t i = 0; i < t.s.size(); ++i)
    if (std::abs(t.s[i] - s) < 1e-12) is = i;
  require(is < t.s.size(), ErrorKind::InvalidInput, "Sobolev order was not traced");
  const auto& nu = t.norm[is];
  const auto& pf = t.pnorm[is];
  EstimateMargin m;
  m.s = s;
  m.p = p;
  m.eps = t.eps;
  m.lambda = lambda;
  double lhs = 0, forcing = 0;
  for (std::size_t k = 0; k < t.z.size(); ++k) {
    const double e = std::exp(-lambda * t.z[k]);
    if (std::isinf(p)) lhs = std::max(lhs, e * nu[k]);
    if (k == 0) continue;
    const double h = t.z[k] - t.z[k - 1];
    const double e0 = std::exp(-lambda * t.z[k - 1]);
    if (!std::isinf(p)) lhs += 0.5 * h * (std::pow(e0 * nu[k - 1], p) + std::pow(e * nu[k], p)) * lambda;
    forcing += 0.5 * h * (e0 * pf[k - 1] + e * pf[k]);
  }
  if (!std::isinf(p)) lhs = std::pow(0.5 * lhs, 1.0 / p);
  m.lhs = lhs;
  m.rhs = nu[0] + 2 * forcing;
  m.margin = m.rhs - m.lhs;
  return m;
}

EstimateMargin check_energy_estimate(const EnergyTrace& t, double s, double p, const EpsNet& lambda) {
  auto k = lambda.grid().find(t.eps);
  require(bool(k), ErrorKind::InvalidInput, "trace eps is not on the lambda grid");
  return check_energy_estimate(t, s, p, lambda[*k]);
}

std::string GardingReport::text() const {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "garding: " << (pass ? "pass" : "fail") << (nonnegative ? " (nonnegative)" : "") << " class "
     << net_class_name(cls) << " C " << fitted_C << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    os << "  eps " << grid[i] << " band " << band[i] << " min " << minimum[i] << "\n";
  return os.str();
}

GardingReport garding_check(const Symbol& a, const EpsGrid& grid, const GardingOptions& opt) {
  require(is_pow2(opt.n), ErrorKind::InvalidInput, "grid sizes must be powers of two");
  require(opt.fields >= 32, ErrorKind::InvalidInput, "the Garding probe needs at least 32 fields per eps");
  require(a.n_lat == 1, ErrorKind::InvalidInput, "one lateral axis only");
  GardingReport rep;
  rep.grid = grid;
  std::mt19937_64 gen(opt.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = opt.n;
  const double dx = opt.period / n;
  const double dk = 2 * 3.14159265358979323846 / opt.period;
  QuantizeOptions q;
  q.tau = opt.tau;
  std::vector<double> neg;
  // Dense symbols are applied through one cached matrix per eps.
  const bool refine = opt.refine_steps > 0 && n <= 2048;
  const bool dense = refine || quantize_path(a) == QuantizePath::Dense;
  const bool eps_free = !depends_on_eps(a.e);
  OperatorMatrix M;
  for (std::size_t ie = 0; ie < grid.size(); ++ie) {
    const double eps = grid[ie];
    if (dense && (ie == 0 || !eps_free)) M = operator_matrix(a, n, dx, opt.z, eps, opt.tau);
    const int band = int(std::min(double(n / 2 - 1), std::ceil(std::pow(eps, -opt.band_exponent))));
    rep.band.push_back(band);
    double best = std::numeric_limits<double>::infinity();
    std::vector<cplx> best_field;
    for (int f = 0; f < opt.fields; ++f) {
      std::vector<cplx> uh(n, 0.0);
      if (f % 2 == 0) {
        for (int k = 0; k < n; ++k)
          if (std::abs(fft_index(k, n)) <= band) uh[k] = {normal(gen), normal(gen)};
      } else {
        // wave packet with random center, width and carrier inside the band
        const double x0 = unif(gen) * opt.period;
        const double width = opt.period * (1.0 / 64 + unif(gen) / 8);
        const double k0 = (2 * unif(gen) - 1) * band;
        for (int k = 0; k < n; ++k) {
          const int m = fft_index(k, n);
          if (std::abs(m) > band) continue;
          const double kk = m * dk, d = kk - k0 * dk;
          uh[k] = std::exp(-0.5 * d * d * width * width) * std::exp(cplx(0.0, -kk * x0));
        }
      }
      GridField u({n}, {dx}, opt.z, eps);
      u.values = uh;
      fft_backward(u.values, {n});
      const double nn = l2_norm(u);
      if (nn == 0) continue;
      for (auto& v : u.values) v /= nn;
      GridField au = u;
      if (dense)
        au.values = M.apply(u.values);
      else
        au = quantize_apply(a, u, q);
      const double q = inner(au, u).real();
      if (q < best) {
        best = q;
        best_field = u.values;
      }
    }
    if (refine && !best_field.empty()) best = std::min(best, rayleigh_ritz(M, best_field, band, opt.refine_steps));
    rep.minimum.push_back(best);
    neg.push_back(std::max(0.0, -best));
  }
  rep.negative = EpsNet(grid, neg, "garding_negative");
  // C omega_eps with omega = log log(1/eps), C the smallest constant covering every sample
  const EpsNet omega = make_loglog_net(grid);
  double C = 0;
  std::vector<double> fitted(neg.size()), shifted(neg.size());
  for (std::size_t i = 0; i < neg.size(); ++i) C = std::max(C, neg[i] / omega[i]);
  for (std::size_t i = 0; i < neg.size(); ++i) {
    fitted[i] = C * omega[i];
    shifted[i] = 1 + neg[i];
  }
  rep.fitted_C = C;
  rep.constant = EpsNet(grid, fitted, "garding_constant");
  rep.nonnegative = std::all_of(neg.begin(), neg.end(), [](double v) { return v == 0.0; });
  try {
    rep.cls = classify_net(EpsNet(grid, shifted)).cls;
  } catch (const Error&) {
    rep.cls = NetClass::Unclassified;
  }
  rep.constant.set_class(rep.cls);
  rep.pass = rep.nonnegative || rep.cls == NetClass::Lsc;
  return rep;
}

EpsNet energy_lambda(const GardingReport& g) {
  std::vector<double> v;
  for (std::size_t i = 0; i < g.grid.size(); ++i) v.push_back(2 * g.constant[i] + 1);
  return EpsNet(g.grid, v, "lambda");
}

double cone_energy_fraction(const GridField& u, double tau, double c, double theta) {
  require(u.ndim() == 1, ErrorKind::InvalidInput, "cone fraction works on one x axis");
  std::vector<cplx> w = u.values;
  fft_forward(w, u.n);
  const auto xi = u.frequencies(0);
  double out = 0, all = 0;
  const double lim = std::sin(theta);
  for (std::size_t k = 0; k < w.size(); ++k) {
    double e = std::norm(w[k]);
    all += e;
    if (std::abs(c * xi[k] / tau) > lim) out += e;
  }
  return all > 0 ? out / all : 0.0;
}

void write_trace_csv(const std::string& path, const std::vector<EnergyTrace>& traces) {
  std::ofstream f(path);
  require(bool(f), ErrorKind::Io, "cannot write " + path);
  f << "z,eps,s,norm_Hs,Pnorm_Hs,lambda\n";
  f << std::setprecision(17);
  for (auto& t : traces)
    for (std::size_t i = 0; i < t.s.size(); ++i)
      for (std::size_t k = 0; k < t.z.size(); ++k)
        f << t.z[k] << "," << t.eps << "," << t.s[i] << "," << t.norm[i][k] << "," << t.pnorm[i][k] << "," << t.lambda
          << "\n";
}

}  // namespace psido
