#include "psido/scalenets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "psido/errors.hpp"

namespace psido {

EpsGrid::EpsGrid(std::vector<double> values) : v_(std::move(values)) {
  require(!v_.empty(), ErrorKind::InvalidInput, "empty eps grid");
  for (std::size_t i = 0; i < v_.size(); ++i) {
    require(std::isfinite(v_[i]) && v_[i] > 0.0 && v_[i] <= 1.0, ErrorKind::InvalidInput,
            "eps grid values must lie in (0,1]");
    if (i > 0)
      require(v_[i] < v_[i - 1], ErrorKind::InvalidInput, "eps grid must be strictly decreasing");
  }
}

EpsGrid EpsGrid::decades(int kmin, int kmax) {
  std::vector<double> v;
  for (int k = kmin; k <= kmax; ++k) v.push_back(std::pow(10.0, -k));
  return EpsGrid(std::move(v));
}

std::optional<std::size_t> EpsGrid::find(double eps) const {
  for (std::size_t i = 0; i < v_.size(); ++i)
    if (std::abs(v_[i] - eps) <= 1e-9 * v_[i]) return i;
  return std::nullopt;
}

std::size_t EpsGrid::index_of(double eps) const {
  auto i = find(eps);
  if (!i) {
    std::ostringstream os;
    os << "eps " << eps << " is not on the grid";
    fail(ErrorKind::InvalidInput, os.str());
  }
  return *i;
}

double EpsGrid::decades_spanned() const {
  if (v_.size() < 2) return 0.0;
  return std::log10(v_.front() / v_.back());
}

const char* net_class_name(NetClass c) {
  switch (c) {
    case NetClass::Unset: return "unset";
    case NetClass::Lsc: return "lsc";
    case NetClass::ScNotLsc: return "sc-not-lsc";
    case NetClass::ModerateNotSc: return "moderate-not-sc";
    case NetClass::Negligible: return "negligible";
    case NetClass::Unclassified: return "unclassified";
  }
  return "unset";
}

NetClass net_class_from_name(const std::string& s) {
  for (NetClass c : {NetClass::Unset, NetClass::Lsc, NetClass::ScNotLsc, NetClass::ModerateNotSc,
                     NetClass::Negligible, NetClass::Unclassified})
    if (s == net_class_name(c)) return c;
  fail(ErrorKind::InvalidInput, "unknown net class '" + s + "'");
}

EpsNet::EpsNet(EpsGrid grid, std::vector<double> values, std::string name)
    : grid_(std::move(grid)), vals_(std::move(values)), name_(std::move(name)) {
  require(vals_.size() == grid_.size(), ErrorKind::InvalidInput,
          "net length does not match its eps grid");
}

EpsNet make_loglog_net(const EpsGrid& g) {
  std::vector<double> v;
  for (double e : g.values()) {
    double l = std::log(1.0 / e);
    require(l > 1.0, ErrorKind::InvalidInput, "loglog net needs eps < 1/e");
    v.push_back(std::log(l));
  }
  return EpsNet(g, std::move(v), "loglog");
}

EpsNet make_const_net(const EpsGrid& g, double c) {
  return EpsNet(g, std::vector<double>(g.size(), c), "const");
}

EpsNet make_power_net(const EpsGrid& g, double exponent) {
  std::vector<double> v;
  for (double e : g.values()) v.push_back(std::pow(e, exponent));
  return EpsNet(g, std::move(v), "power");
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept,
                 double* rms) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  double s = sxx > 0 ? sxy / sxx : 0.0;
  double b = my - s * mx;
  if (intercept) *intercept = b;
  if (rms) {
    double r = 0;
    for (std::size_t i = 0; i < n; ++i) r += std::pow(y[i] - (s * x[i] + b), 2);
    *rms = std::sqrt(r / n);
  }
  return s;
}

Classification classify_net(const EpsNet& net, const ClassifyOptions& opt) {
  const auto& g = net.grid();
  const auto& w = net.values();
  for (double v : w)
    require(std::isfinite(v), ErrorKind::InvalidInput, "net has non-finite samples");
  if (w.size() < opt.min_points || g.decades_spanned() < opt.min_decades - 1e-9)
    fail(ErrorKind::InsufficientData, "classification needs at least 6 points over 4 decades");

  Classification c;
  const std::size_t n = w.size();
  std::vector<double> L(n), logL(n), logw(n);
  double wmin = std::numeric_limits<double>::infinity();
  bool positive = true;
  for (std::size_t i = 0; i < n; ++i) {
    L[i] = std::log(1.0 / g[i]);
    double a = std::abs(w[i]);
    wmin = std::min(wmin, a);
    if (!(a > 0)) positive = false;
    logw[i] = a > 0 ? std::log(a) : -745.0;
  }
  c.power_exponent = lsq_slope(L, logw);
  c.lower_bound = wmin;

  if (!positive) {
    bool all_zero = std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; });
    // Samples that underflowed to zero enter the fit at the double floor.
    bool decays = all_zero || c.power_exponent <= opt.negligible_power;
    c.cls = decays ? NetClass::Negligible : NetClass::Unclassified;
    c.note = all_zero ? "identically zero" : decays ? "decays to zero" : "net vanishes at some samples";
    return c;
  }
  if (c.power_exponent <= opt.negligible_power) {
    c.cls = NetClass::Negligible;
    c.note = "decays like a power of eps";
    return c;
  }

  // Lower bound: no systematic decay over the finer half of the grid.
  std::vector<double> Lt(L.begin() + n / 2, L.end()), wt(logw.begin() + n / 2, logw.end());
  double tail = lsq_slope(Lt, wt);
  c.bounded_below = tail >= -opt.lower_bound_tol && c.power_exponent >= -opt.lower_bound_tol;
  if (!c.bounded_below) {
    c.cls = NetClass::Unclassified;
    c.note = "positive but decaying; no positive lower bound";
    return c;
  }

  const int ps[3] = {1, 2, 4};
  bool lsc = true;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> lr(n);
    double cmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = std::pow(std::abs(w[i]), ps[k]) / L[i];
      cmax = std::max(cmax, r);
      lr[i] = std::log(r);
    }
    c.c_p[k] = cmax;
    c.ratio_slope[k] = lsq_slope(L, lr);
    if (c.ratio_slope[k] > opt.ratio_growth_tol) lsc = false;
  }
  if (lsc) {
    c.cls = NetClass::Lsc;
  } else if (c.power_exponent <= opt.sc_power_tol) {
    c.cls = NetClass::ScNotLsc;
    c.note = "ratio to log(1/eps) diverges";
  } else {
    c.cls = NetClass::ModerateNotSc;
    c.note = "grows like a power of 1/eps";
  }
  return c;
}

std::string format_eps_grid(const EpsGrid& g) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (double e : g.values()) os << e << "\n";
  return os.str();
}

EpsGrid parse_eps_grid(const std::string& text) {
  std::istringstream is(text);
  std::vector<double> v;
  std::string line;
  while (std::getline(is, line)) {
    auto p = line.find('#');
    if (p != std::string::npos) line.resize(p);
    std::istringstream ls(line);
    double x;
    if (!(ls >> x)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        fail(ErrorKind::InvalidInput, "bad eps grid line '" + line + "'");
      continue;
    }
    v.push_back(x);
  }
  return EpsGrid(std::move(v));
}

EpsGrid read_eps_grid(const std::string& path) {
  std::ifstream f(path);
  require(bool(f), ErrorKind::Io, "cannot open eps grid file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_eps_grid(ss.str());
}

void write_eps_grid(const std::string& path, const EpsGrid& g) {
  std::ofstream f(path);
  require(bool(f), ErrorKind::Io, "cannot write " + path);
  f << format_eps_grid(g);
}

}  // namespace psido
