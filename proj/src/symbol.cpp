#include "psido/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "psido/errors.hpp"

namespace psido {

int total_order(const MultiIndex& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

MultiIndex mi(std::initializer_list<std::pair<int, int>> var_orders) {
  MultiIndex a{};
  for (auto [v, k] : var_orders) a[v] += k;
  return a;
}

std::vector<int> Symbol::freq_vars() const {
  std::vector<int> f;
  if (has_tau) f.push_back(TAU);
  f.push_back(XI);
  if (n_lat == 2) f.push_back(ETA);
  return f;
}

std::vector<int> Symbol::space_vars() const {
  std::vector<int> s{X};
  if (n_lat == 2) s.push_back(Y);
  return s;
}

Symbol Symbol::with(Ex ex, double order) const {
  Symbol s = *this;
  s.e = ex;
  s.m = order;
  return s;
}

namespace {

void check_compatible(const Symbol& a, const Symbol& b) {
  require(a.n_lat == b.n_lat && a.has_tau == b.has_tau, ErrorKind::InvalidInput,
          "symbols live on different phase spaces");
}

Symbol merged(const Symbol& a, const Symbol& b, Ex e, double m) {
  Symbol s = a.with(e, m);
  s.rho = std::min(a.rho, b.rho);
  s.delta = std::max(a.delta, b.delta);
  s.budget = std::min(a.budget, b.budget);
  return s;
}

}  // namespace

Symbol operator+(const Symbol& a, const Symbol& b) {
  check_compatible(a, b);
  return merged(a, b, a.e + b.e, std::max(a.m, b.m));
}

Symbol operator*(const Symbol& a, const Symbol& b) {
  check_compatible(a, b);
  return merged(a, b, a.e * b.e, a.m + b.m);
}

Symbol scale(const Symbol& a, cplx c) { return a.with(Ex(c) * a.e, a.m); }

Ex derivative_expr(const Ex& e, const MultiIndex& a) {
  Ex r = e;
  for (int v = 0; v < kNumVars; ++v)
    if (a[v] > 0) r = diff(r, v, a[v]);
  return r;
}

Symbol derivative(const Symbol& s, const MultiIndex& a) {
  if (total_order(a) > s.budget) {
    std::ostringstream os;
    os << "derivative of order " << total_order(a) << " exceeds budget " << s.budget;
    fail(ErrorKind::Budget, os.str());
  }
  int nf = 0, ns = 0;
  for (int v : s.freq_vars()) nf += a[v];
  for (int v : s.space_vars()) ns += a[v];
  return s.with(derivative_expr(s.e, a), s.m - s.rho * nf + s.delta * ns);
}

cplx finite_difference(const Ex& e, const MultiIndex& a, const PhasePoint& p, double eps) {
  int v = -1;
  for (int k = 0; k < kNumVars; ++k)
    if (a[k] > 0) {
      v = k;
      break;
    }
  if (v < 0) return evaluate_at(e, p, eps);
  MultiIndex rest = a;
  rest[v] -= 1;
  auto g = [&](double t) {
    PhasePoint q = p;
    q[v] = t;
    return finite_difference(e, rest, q, eps);
  };
  const double x = p[v];
  auto D = [&](double h) {
    return (-g(x + 2 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2 * h)) / (12.0 * h);
  };
  const double h = 1e-3 * (1.0 + std::abs(x));
  return (16.0 * D(h / 2) - D(h)) / 15.0;
}

DerivValue eval_with_derivs(const Symbol& s, const MultiIndex& a, const PhasePoint& p, double eps,
                            const EvalOptions& opt) {
  if (total_order(a) > s.budget) {
    std::ostringstream os;
    os << "derivative of order " << total_order(a) << " exceeds budget " << s.budget;
    fail(ErrorKind::Budget, os.str());
  }
  if (!opt.force_finite_difference) {
    Ex d = derivative_expr(s.e, a);
    if (node_count(d) <= opt.max_nodes) return {evaluate_at(d, p, eps), false};
  }
  return {finite_difference(s.e, a, p, eps), true};
}

std::size_t SampleBox::size() const {
  std::size_t n = 1;
  for (int c : count) n *= std::size_t(c);
  return n;
}

Points SampleBox::points(double eps) const {
  for (int v = 0; v < kNumVars; ++v)
    require(count[v] == 1 || count[v] >= 8, ErrorKind::InvalidInput,
            "sample boxes need at least 8 points per varied axis");
  const std::size_t n = size();
  Points pts;
  pts.eps = eps;
  for (int v = 0; v < kNumVars; ++v) pts.c[v].resize(n);
  std::size_t stride = 1;
  for (int v = kNumVars - 1; v >= 0; --v) {
    for (std::size_t i = 0; i < n; ++i) {
      int k = int((i / stride) % count[v]);
      pts.c[v][i] = count[v] == 1 ? lo[v] : lo[v] + (hi[v] - lo[v]) * k / (count[v] - 1);
    }
    stride *= count[v];
  }
  return pts;
}

double seminorm(const Symbol& s, const MultiIndex& a, const SampleBox& box, double eps) {
  Symbol d = derivative(s, a);
  Points pts = box.points(eps);
  auto vals = evaluate(d.e, pts);
  double best = 0;
  const auto fv = s.freq_vars();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    double r2 = 1;
    for (int v : fv) r2 += pts.c[v][i] * pts.c[v][i];
    double w = std::pow(std::sqrt(r2), -d.m);
    best = std::max(best, std::abs(vals[i]) * w);
  }
  return best;
}

namespace {

OrderFit fit_once(const Symbol& s, const OrderFitOptions& opt, double eps) {
  Ex d = derivative(s, opt.alpha).e;
  const auto fv = s.freq_vars();
  std::vector<PhasePoint> bases = opt.bases.empty() ? std::vector<PhasePoint>{PhasePoint{}} : opt.bases;
  Points pts;
  pts.eps = eps;
  for (auto& c : pts.c) c.clear();
  std::vector<std::size_t> owner;
  for (std::size_t r = 0; r < opt.magnitudes.size(); ++r)
    for (auto& ray : opt.rays)
      for (auto& b : bases) {
        PhasePoint q = b;
        double norm = 0;
        for (int v : fv) norm += ray[v] * ray[v];
        norm = std::sqrt(norm);
        require(norm > 0, ErrorKind::InvalidInput, "fit ray has no frequency component");
        for (int v : fv) q[v] = opt.magnitudes[r] * ray[v] / norm;
        for (int v = 0; v < kNumVars; ++v) pts.c[v].push_back(q[v]);
        owner.push_back(r);
      }
  auto vals = evaluate(d, pts);
  OrderFit f;
  f.magnitudes = opt.magnitudes;
  f.values.assign(opt.magnitudes.size(), 0.0);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    double a = std::abs(vals[i]);
    require(std::isfinite(a), ErrorKind::Numeric, "symbol is not finite on the fit rays");
    f.values[owner[i]] = std::max(f.values[owner[i]], a);
  }
  if (std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0.0; })) {
    f.identically_zero = true;
    return f;
  }
  std::vector<double> lx, ly;
  for (std::size_t r = 0; r < f.values.size(); ++r) {
    lx.push_back(std::log(std::sqrt(1 + opt.magnitudes[r] * opt.magnitudes[r])));
    ly.push_back(std::log(std::max(f.values[r], 1e-300)));
  }
  f.slope = lsq_slope(lx, ly, &f.intercept, &f.residual);
  return f;
}

}  // namespace

OrderFit fit_order(const Symbol& s, const OrderFitOptions& opt) {
  require(!opt.rays.empty(), ErrorKind::InvalidInput, "fit needs at least one ray");
  require(opt.magnitudes.size() >= 3, ErrorKind::InsufficientData, "fit needs at least 3 magnitudes");
  auto [mn, mx] = std::minmax_element(opt.magnitudes.begin(), opt.magnitudes.end());
  require(*mn > 0 && *mx / *mn >= 8.0 - 1e-12, ErrorKind::InsufficientData,
          "fit magnitudes must span at least 3 octaves");
  double eps = opt.eps;
  if (opt.prefactor_grid && !opt.prefactor_grid->find(eps)) eps = (*opt.prefactor_grid)[0];
  OrderFit f = fit_once(s, opt, eps);
  if (opt.prefactor_grid && !f.identically_zero) {
    std::vector<double> pre;
    for (double e : opt.prefactor_grid->values()) pre.push_back(std::exp(fit_once(s, opt, e).intercept));
    EpsNet net(*opt.prefactor_grid, pre, "prefactor");
    try {
      f.prefactor_class = classify_net(net).cls;
    } catch (const Error&) {
      f.prefactor_class = NetClass::Unclassified;
    }
    net.set_class(f.prefactor_class);
    f.prefactor = net;
  }
  return f;
}

PointValue point_value(const Symbol& s, const GeneralizedPoint& p) {
  require(p.freq_vars.size() == p.freq.size() && !p.freq.empty(), ErrorKind::InvalidInput,
          "generalized point needs one net per frequency variable");
  PointValue out;
  out.grid = p.freq[0].grid();
  for (auto& n : p.freq)
    require(n.grid() == out.grid, ErrorKind::InvalidInput, "frequency nets use different grids");
  std::vector<double> mod;
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    PhasePoint q = p.base;
    for (std::size_t k = 0; k < p.freq_vars.size(); ++k) q[p.freq_vars[k]] = p.freq[k][i];
    cplx v = evaluate_at(s.e, q, out.grid[i]);
    out.values.push_back(v);
    mod.push_back(std::abs(v));
  }
  out.modulus = EpsNet(out.grid, mod, "point-value");
  try {
    out.cls = classify_net(out.modulus).cls;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData) throw;
    out.cls = NetClass::Unset;
  }
  out.modulus.set_class(out.cls);
  return out;
}

NetClass difference_class(const PointValue& a, const PointValue& b) {
  require(a.grid == b.grid, ErrorKind::InvalidInput, "point values use different grids");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.values.size(); ++i) d.push_back(std::abs(a.values[i] - b.values[i]));
  return classify_net(EpsNet(a.grid, d)).cls;
}

Ex origin_cutoff(const std::vector<int>& freq_vars, double radius) {
  std::vector<Ex> sq;
  for (int v : freq_vars) sq.push_back(pow(var(v), 2));
  return join_abs(sum(sq), radius * radius / 4, radius * radius);
}

Symbol excise_origin(const Symbol& s, double radius) {
  return s.with((Ex(1.0) - origin_cutoff(s.freq_vars(), radius)) * s.e, s.m);
}

std::string serialize_symbol(const Symbol& s) {
  std::string body = serialize(s.e);
  std::ostringstream meta;
  meta << std::setprecision(17) << "meta " << s.m << " " << s.rho << " " << s.delta << " " << s.n_lat
       << " " << (s.has_tau ? 1 : 0) << " " << s.budget << "\n";
  auto nl = body.find('\n');
  return body.substr(0, nl + 1) + meta.str() + body.substr(nl + 1);
}

Symbol deserialize_symbol(const std::string& text) {
  auto a = text.find("\nmeta ");
  require(a != std::string::npos, ErrorKind::InvalidInput, "symbol text lacks a meta line");
  auto b = text.find('\n', a + 1);
  std::istringstream ms(text.substr(a + 6, b - a - 6));
  Symbol s;
  int tau;
  require(bool(ms >> s.m >> s.rho >> s.delta >> s.n_lat >> tau >> s.budget), ErrorKind::InvalidInput,
          "malformed symbol meta line");
  s.has_tau = tau != 0;
  s.e = deserialize(text.substr(0, a + 1) + text.substr(b + 1));
  return s;
}

}  // namespace psido
