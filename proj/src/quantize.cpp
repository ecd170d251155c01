#include "psido/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "psido/errors.hpp"
#include "psido/fft.hpp"

namespace psido {

namespace {

constexpr std::uint8_t kSpaceMask = (1u << X) | (1u << Y);
constexpr std::uint8_t kFreqMask = (1u << TAU) | (1u << XI) | (1u << ETA);

bool mixes(const Node* n) { return (n->deps & kSpaceMask) && (n->deps & kFreqMask); }

void check_dims(const Symbol& a, const GridField& u) {
  require(a.n_lat == 1, ErrorKind::InvalidInput, "grid fields carry one lateral axis");
  require(u.ndim() == 1 || a.has_tau || !a.e.depends_on(TAU), ErrorKind::InvalidInput,
          "symbol depends on tau but is not declared with a time frequency");
}

// Twiddles e^{2 pi i m / n}, m = 0..n-1.
std::vector<cplx> twiddles(int n) {
  std::vector<cplx> w(n);
  for (int m = 0; m < n; ++m) w[m] = std::polar(1.0, 2 * M_PI * m / n);
  return w;
}

// Applies a on one row of x-frequency coefficients at fixed tau, dense in x.
// Returns x-space samples times n (no 1/n normalization).
std::vector<cplx> dense_row(const Ex& e, const std::vector<cplx>& uh, const std::vector<double>& x,
                            const std::vector<double>& xi, double tau, double z, double eps) {
  const int n = int(x.size());
  const auto w = twiddles(n);
  std::vector<cplx> out(n);
  const int rows = std::max(1, (1 << 16) / n);
  Points pts;
  pts.eps = eps;
  pts.set(TAU, tau);
  pts.set(Z, z);
  std::vector<double> px, pxi;
  for (int j0 = 0; j0 < n; j0 += rows) {
    int j1 = std::min(n, j0 + rows);
    px.clear();
    pxi.clear();
    for (int j = j0; j < j1; ++j)
      for (int k = 0; k < n; ++k) {
        px.push_back(x[j]);
        pxi.push_back(xi[k]);
      }
    pts.set(X, px);
    pts.set(XI, pxi);
    auto vals = evaluate(e, pts);
    if (vals.size() == 1) vals.assign(px.size(), vals[0]);
    for (int j = j0; j < j1; ++j) {
      cplx s = 0;
      const cplx* row = vals.data() + std::size_t(j - j0) * n;
      for (int k = 0; k < n; ++k) s += row[k] * uh[k] * w[(std::size_t(j) * k) % n];
      out[j] = s;
    }
  }
  return out;
}

std::vector<cplx> eval_freq(const Ex& e, const std::vector<double>& tau, const std::vector<double>& xi,
                            double z, double eps) {
  Points pts;
  pts.eps = eps;
  pts.set(Z, z);
  pts.set(TAU, tau);
  pts.set(XI, xi);
  auto v = evaluate(e, pts);
  if (v.size() == 1) v.assign(std::max(tau.size(), xi.size()), v[0]);
  return v;
}

// Frequency sample arrays over the whole grid in storage order.
void freq_arrays(const GridField& u, double tau_fixed, std::vector<double>& tau, std::vector<double>& xi) {
  auto fx = u.frequencies(u.ndim() - 1);
  if (u.ndim() == 1) {
    tau = {tau_fixed};
    xi = fx;
    return;
  }
  auto ft = u.frequencies(0);
  tau.clear();
  xi.clear();
  for (int a = 0; a < u.n[0]; ++a)
    for (int b = 0; b < u.n[1]; ++b) {
      tau.push_back(ft[a]);
      xi.push_back(fx[b]);
    }
}

GridField apply_multiplier(const Ex& e, const GridField& u, double tau_fixed) {
  GridField out = u;
  fft_forward(out.values, u.n);
  std::vector<double> tau, xi;
  freq_arrays(u, tau_fixed, tau, xi);
  auto m = eval_freq(e, tau, xi, u.z, u.eps);
  const double inv = 1.0 / double(u.size());
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= m[i] * inv;
  fft_backward(out.values, u.n);
  return out;
}

GridField apply_separable(const std::vector<SeparableTerm>& terms, const GridField& u, double tau_fixed) {
  // Group by the space factor so each distinct f(x) costs one inverse transform.
  std::map<const Node*, std::vector<Ex>> groups;
  std::vector<const Node*> order;
  for (auto& t : terms) {
    auto it = groups.find(t.space.node());
    if (it == groups.end()) order.push_back(t.space.node());
    groups[t.space.node()].push_back(t.freq);
  }
  GridField uh = u;
  fft_forward(uh.values, u.n);
  std::vector<double> tau, xi;
  freq_arrays(u, tau_fixed, tau, xi);
  const auto xs = u.coords(u.ndim() - 1);
  const int nx = u.nx();
  const double inv = 1.0 / double(u.size());
  GridField out = u;
  std::fill(out.values.begin(), out.values.end(), 0.0);
  Points px;
  px.eps = u.eps;
  px.set(Z, u.z);
  px.set(X, xs);
  for (const Node* f : order) {
    auto g = eval_freq(sum(groups[f]), tau, xi, u.z, u.eps);
    std::vector<cplx> w(uh.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = g[i] * uh.values[i] * inv;
    fft_backward(w, u.n);
    auto fv = evaluate(Ex(f), px);
    for (std::size_t i = 0; i < w.size(); ++i) out.values[i] += fv[fv.size() == 1 ? 0 : i % nx] * w[i];
  }
  return out;
}

GridField apply_dense(const Ex& e, const GridField& u, double tau_fixed) {
  GridField uh = u;
  fft_forward(uh.values, u.n);
  const auto xs = u.coords(u.ndim() - 1);
  const auto fx = u.frequencies(u.ndim() - 1);
  const int nx = u.nx();
  GridField out = u;
  if (u.ndim() == 1) {
    auto r = dense_row(e, uh.values, xs, fx, tau_fixed, u.z, u.eps);
    for (int j = 0; j < nx; ++j) out.values[j] = r[j] / double(nx);
    return out;
  }
  // (t, x): rows of fixed tau, then an inverse transform in t per column.
  const int nt = u.n[0];
  const auto ft = u.frequencies(0);
  std::vector<cplx> mixed(u.size());
  for (int a = 0; a < nt; ++a) {
    std::vector<cplx> row(uh.values.begin() + std::size_t(a) * nx, uh.values.begin() + std::size_t(a + 1) * nx);
    auto r = dense_row(e, row, xs, fx, ft[a], u.z, u.eps);
    std::copy(r.begin(), r.end(), mixed.begin() + std::size_t(a) * nx);
  }
  std::vector<cplx> col(nt);
  const double inv = 1.0 / double(u.size());
  for (int j = 0; j < nx; ++j) {
    for (int a = 0; a < nt; ++a) col[a] = mixed[std::size_t(a) * nx + j];
    fft_backward(col, {nt});
    for (int a = 0; a < nt; ++a) out.values[std::size_t(a) * nx + j] = col[a] * inv;
  }
  return out;
}

}  // namespace

bool split_separable(const Ex& a, std::vector<SeparableTerm>& out) {
  out.clear();
  std::vector<const Node*> terms;
  if (a->op == Op::Add)
    terms = a->kids;
  else
    terms.push_back(a.node());
  for (const Node* t : terms) {
    if (!mixes(t)) {
      if (t->deps & kFreqMask)
        out.push_back({Ex(1.0), Ex(t)});
      else
        out.push_back({Ex(t), Ex(1.0)});
      continue;
    }
    if (t->op != Op::Mul) return false;
    std::vector<Ex> sp, fr;
    for (const Node* k : t->kids) {
      if (mixes(k)) return false;
      (k->deps & kFreqMask ? fr : sp).push_back(Ex(k));
    }
    out.push_back({product(sp), product(fr)});
  }
  return true;
}

QuantizePath quantize_path(const Symbol& a) {
  if (!(a.e->deps & kSpaceMask)) return QuantizePath::Multiplier;
  std::vector<SeparableTerm> t;
  if (split_separable(a.e, t)) return QuantizePath::Separable;
  return QuantizePath::Dense;
}

GridField quantize_apply(const Symbol& a, const GridField& u, const QuantizeOptions& opt) {
  u.validate();
  check_dims(a, u);
  QuantizePath path = opt.path == QuantizePath::Auto ? quantize_path(a) : opt.path;
  switch (path) {
    case QuantizePath::Multiplier:
      require(!(a.e->deps & kSpaceMask), ErrorKind::InvalidInput, "multiplier path needs an x-independent symbol");
      return apply_multiplier(a.e, u, opt.tau);
    case QuantizePath::Separable: {
      std::vector<SeparableTerm> t;
      require(split_separable(a.e, t), ErrorKind::InvalidInput, "symbol is not a sum of separable terms");
      return apply_separable(t, u, opt.tau);
    }
    default:
      return apply_dense(a.e, u, opt.tau);
  }
}

std::vector<cplx> OperatorMatrix::apply(const std::vector<cplx>& u) const {
  require(int(u.size()) == n, ErrorKind::InvalidInput, "operator and vector sizes differ");
  std::vector<cplx> out(n);
  for (int j = 0; j < n; ++j) {
    cplx s = 0;
    const cplx* row = m.data() + std::size_t(j) * n;
    for (int l = 0; l < n; ++l) s += row[l] * u[l];
    out[j] = s;
  }
  return out;
}

OperatorMatrix OperatorMatrix::adjoint() const {
  OperatorMatrix t;
  t.n = n;
  t.m.resize(m.size());
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) t.m[std::size_t(l) * n + j] = std::conj(m[std::size_t(j) * n + l]);
  return t;
}

OperatorMatrix operator_matrix(const Symbol& a, int nx, double dx, double z, double eps, double tau) {
  require(a.n_lat == 1, ErrorKind::InvalidInput, "operator matrices carry one lateral axis");
  require(is_pow2(nx), ErrorKind::InvalidInput, "grid sizes must be powers of two");
  GridField g({nx}, {dx}, z, eps);
  const auto xs = g.coords(0);
  const auto xi = g.frequencies(0);
  const auto w = twiddles(nx);
  OperatorMatrix M;
  M.n = nx;
  M.m.resize(std::size_t(nx) * nx);
  const bool x_free = !(a.e->deps & kSpaceMask);
  Points pts;
  pts.eps = eps;
  pts.set(TAU, tau);
  pts.set(Z, z);
  pts.set(XI, xi);
  std::vector<cplx> sym;
  if (x_free) sym = evaluate(a.e, pts);
  std::vector<cplx> c(nx);
  for (int j = 0; j < nx; ++j) {
    if (!x_free) {
      pts.set(X, xs[j]);
      sym = evaluate(a.e, pts);
    }
    for (int k = 0; k < nx; ++k) c[k] = sym[sym.size() == 1 ? 0 : k] * w[(std::size_t(j) * k) % nx];
    fft_forward(c, {nx});
    for (int l = 0; l < nx; ++l) M.m[std::size_t(j) * nx + l] = c[l] / double(nx);
  }
  return M;
}

}  // namespace psido
