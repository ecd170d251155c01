#include "psido/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psido/errors.hpp"

namespace psido {

namespace {

const cplx kMinusI{0.0, -1.0};

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Lateral multi-indices of total order j in n_lat dimensions.
std::vector<std::array<int, 2>> lateral_indices(int n_lat, int j) {
  std::vector<std::array<int, 2>> out;
  if (n_lat == 1) {
    out.push_back({j, 0});
  } else {
    for (int a = j; a >= 0; --a) out.push_back({a, j - a});
  }
  return out;
}

MultiIndex freq_index(const std::array<int, 2>& a) { return mi({{XI, a[0]}, {ETA, a[1]}}); }
MultiIndex space_index(const std::array<int, 2>& a) { return mi({{X, a[0]}, {Y, a[1]}}); }

void check_pair(const Symbol& a, const Symbol& b) {
  require(a.n_lat == b.n_lat && a.has_tau == b.has_tau, ErrorKind::InvalidInput,
          "symbols live on different phase spaces");
}

Symbol shell(const Symbol& a, const Symbol& b) {
  Symbol s = a;
  s.rho = std::min(a.rho, b.rho);
  s.delta = std::max(a.delta, b.delta);
  s.budget = std::min(a.budget, b.budget);
  require(s.delta < s.rho, ErrorKind::InvalidInput, "symbol type needs delta < rho");
  return s;
}

}  // namespace

Symbol TruncatedExpansion::partial_sum(int upto) const {
  require(!terms.empty(), ErrorKind::InvalidInput, "empty expansion");
  int n = upto < 0 ? int(terms.size()) : std::min<int>(upto, int(terms.size()));
  std::vector<Ex> parts;
  for (int j = 0; j < n; ++j) parts.push_back(terms[j].e);
  return terms.front().with(sum(parts), terms.front().m);
}

void TruncatedExpansion::validate() const {
  require(!terms.empty(), ErrorKind::InvalidInput, "empty expansion");
  for (std::size_t j = 1; j < terms.size(); ++j)
    require(terms[j].m < terms[j - 1].m, ErrorKind::InvalidInput,
            "expansion orders must be strictly decreasing");
}

Ex compose_term(const Symbol& a, const Symbol& b, int k) {
  std::vector<Ex> parts;
  for (auto& al : lateral_indices(a.n_lat, k)) {
    Ex da = derivative(a, freq_index(al)).e;
    if (da.is_zero()) continue;
    Ex db = derivative(b, space_index(al)).e;
    if (db.is_zero()) continue;
    cplx c = std::pow(kMinusI, k) / (factorial(al[0]) * factorial(al[1]));
    parts.push_back(Ex(c) * da * db);
  }
  return sum(parts);
}

Ex adjoint_term(const Symbol& a, int k) {
  Symbol ca = a.with(conj(a.e), a.m);
  std::vector<Ex> parts;
  for (auto& al : lateral_indices(a.n_lat, k)) {
    MultiIndex both = freq_index(al);
    auto sp = space_index(al);
    for (int v = 0; v < kNumVars; ++v) both[v] += sp[v];
    Ex d = derivative(ca, both).e;
    if (d.is_zero()) continue;
    cplx c = std::pow(kMinusI, k) / (factorial(al[0]) * factorial(al[1]));
    parts.push_back(Ex(c) * d);
  }
  return sum(parts);
}

TruncatedExpansion compose(const Symbol& a, const Symbol& b, int N) {
  check_pair(a, b);
  require(N >= 1, ErrorKind::InvalidInput, "composition needs N >= 1");
  Symbol base = shell(a, b);
  TruncatedExpansion out;
  out.truncation = N;
  const double step = base.rho - base.delta;
  for (int j = 0; j < N; ++j) out.terms.push_back(base.with(compose_term(a, b, j), a.m + b.m - j * step));
  return out;
}

Symbol compose_sum(const Symbol& a, const Symbol& b, int N) { return compose(a, b, N).partial_sum(); }

TruncatedExpansion adjoint(const Symbol& a, int N) {
  require(N >= 1, ErrorKind::InvalidInput, "adjoint needs N >= 1");
  require(a.delta < a.rho, ErrorKind::InvalidInput, "symbol type needs delta < rho");
  TruncatedExpansion out;
  out.truncation = N;
  const double step = a.rho - a.delta;
  for (int j = 0; j < N; ++j) out.terms.push_back(a.with(adjoint_term(a, j), a.m - j * step));
  return out;
}

Symbol adjoint_sum(const Symbol& a, int N) { return adjoint(a, N).partial_sum(); }

Ex excision_profile(const std::vector<int>& freq_vars, const Ex& lambda) {
  std::vector<Ex> sq;
  for (int v : freq_vars) sq.push_back(pow(var(v), 2));
  return Ex(1.0) - join_abs(pow(lambda, 2) * sum(sq), 1.0, 4.0);
}

std::vector<EpsNet> excision_radii(const TruncatedExpansion& e, const SumOptions& opt) {
  e.validate();
  EpsGrid grid = opt.grid ? *opt.grid : EpsGrid({1.0});
  const Symbol& s0 = e.terms.front();
  SampleBox box;
  box.axis(X, 0, 2 * M_PI, opt.probe_points);
  if (s0.n_lat == 2) box.axis(Y, 0, 2 * M_PI, opt.probe_points);
  for (int v : s0.freq_vars()) box.axis(v, -opt.probe_radius, opt.probe_radius, opt.probe_points);
  std::vector<EpsNet> out;
  std::vector<double> prev;
  for (std::size_t j = 0; j < e.terms.size(); ++j) {
    SampleBox b = box;
    if (e.terms[j].e.depends_on(Z)) b.axis(Z, 0, 1, opt.probe_points);
    std::vector<double> lam;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double p = seminorm(e.terms[j], {}, b, grid[i]);
      double l = 1.0 / (std::ldexp(1.0, int(j)) * std::max(1.0, p));
      if (!prev.empty()) l = std::min(l, prev[i]);
      lam.push_back(l);
    }
    prev = lam;
    out.emplace_back(grid, lam, "lambda_" + std::to_string(j));
  }
  return out;
}

Symbol asymptotic_sum(TruncatedExpansion& e, const std::vector<EpsNet>& radii) {
  e.validate();
  require(radii.size() == e.terms.size(), ErrorKind::InvalidInput, "one excision radius per term");
  const auto fv = e.terms.front().freq_vars();
  std::vector<Ex> parts;
  int budget = e.terms.front().budget;
  for (std::size_t j = 0; j < e.terms.size(); ++j) {
    const auto& r = radii[j];
    Ex lam = r.size() == 1 && r.grid()[0] == 1.0 ? Ex(r[0]) : net(std::make_shared<EpsNet>(r));
    parts.push_back(excision_profile(fv, lam) * e.terms[j].e);
    budget = std::min(budget, e.terms[j].budget);
  }
  e.excision_radii = radii;
  Symbol s = e.terms.front().with(sum(parts), e.terms.front().m);
  s.budget = budget;
  return s;
}

Symbol asymptotic_sum(TruncatedExpansion& e, const SumOptions& opt) {
  return asymptotic_sum(e, excision_radii(e, opt));
}

Graded::Graded(const Symbol& s, int depth) : base(s), g(std::max(depth, 1), Ex(0.0)) { g[0] = s.e; }

Symbol Graded::total(int upto) const {
  int n = upto < 0 ? depth() : std::min(upto, depth());
  std::vector<Ex> parts(g.begin(), g.begin() + n);
  return base.with(sum(parts), base.m);
}

Graded Graded::truncated(int d) const {
  Graded r = *this;
  r.g.resize(std::max(d, 1), Ex(0.0));
  return r;
}

Graded Graded::retopped(double top) const {
  const double step = base.rho - base.delta;
  double shift = (top - base.m) / step;
  int k = int(std::lround(shift));
  require(k >= 0 && std::abs(shift - k) < 1e-9, ErrorKind::InvalidInput, "grades do not align");
  Graded r = *this;
  r.base.m = top;
  r.g.insert(r.g.begin(), std::size_t(k), Ex(0.0));
  return r;
}

namespace {

// Brings two graded symbols to a common top order.
std::pair<Graded, Graded> aligned(const Graded& a, const Graded& b) {
  check_pair(a.base, b.base);
  double top = std::max(a.base.m, b.base.m);
  Graded x = a.retopped(top), y = b.retopped(top);
  int d = std::max(x.depth(), y.depth());
  return {x.truncated(d), y.truncated(d)};
}

}  // namespace

Graded operator+(const Graded& a, const Graded& b) {
  auto [x, y] = aligned(a, b);
  for (int k = 0; k < x.depth(); ++k) x.g[k] = x.g[k] + y.g[k];
  x.base = shell(x.base, y.base).with(Ex(0.0), x.base.m);
  x.base.e = x.g[0];
  return x;
}

Graded operator-(const Graded& a, const Graded& b) { return a + Ex(-1.0) * b; }

Graded operator*(const Ex& f, const Graded& a) {
  Graded r = a;
  for (auto& e : r.g) e = f * e;
  r.base.e = r.g[0];
  return r;
}

Graded graded_compose(const Graded& a, const Graded& b, int depth) {
  check_pair(a.base, b.base);
  Graded r(shell(a.base, b.base).with(Ex(0.0), a.base.m + b.base.m), depth);
  std::vector<std::vector<Ex>> parts(depth);
  for (int i = 0; i < a.depth() && i < depth; ++i) {
    if (a.g[i].is_zero()) continue;
    Symbol ai = a.grade(i);
    for (int j = 0; i + j < depth && j < b.depth(); ++j) {
      if (b.g[j].is_zero()) continue;
      Symbol bj = b.grade(j);
      for (int k = 0; i + j + k < depth; ++k) parts[i + j + k].push_back(compose_term(ai, bj, k));
    }
  }
  for (int k = 0; k < depth; ++k) r.g[k] = sum(parts[k]);
  r.base.e = r.g[0];
  return r;
}

Graded graded_adjoint(const Graded& a, int depth) {
  Graded r(a.base.with(Ex(0.0), a.base.m), depth);
  std::vector<std::vector<Ex>> parts(depth);
  for (int i = 0; i < a.depth() && i < depth; ++i) {
    if (a.g[i].is_zero()) continue;
    Symbol ai = a.grade(i);
    for (int k = 0; i + k < depth; ++k) parts[i + k].push_back(adjoint_term(ai, k));
  }
  for (int k = 0; k < depth; ++k) r.g[k] = sum(parts[k]);
  r.base.e = r.g[0];
  return r;
}

Graded symmetrize(const Graded& a, int depth) {
  Graded s = a.truncated(depth) + graded_adjoint(a, depth);
  return Ex(0.5) * s;
}

Graded graded_diff(const Graded& a, int v) {
  Graded r = a;
  for (auto& e : r.g) e = diff(e, v);
  r.base.e = r.g[0];
  return r;
}

}  // namespace psido
