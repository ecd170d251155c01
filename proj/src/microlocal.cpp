#include "psido/microlocal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <iomanip>
#include <sstream>

#include "psido/errors.hpp"

namespace psido {

namespace {

double deg(double d) { return d * M_PI / 180.0; }

}  // namespace

bool cone_membership(const PhasePoint& p, double theta, double c_star) {
  const double tau = p[TAU];
  if (tau == 0.0) return false;
  const double xi = std::hypot(p[XI], p[ETA]);
  return std::abs(c_star * xi / tau) <= std::sin(theta);
}

PhaseRegion PhaseRegion::cone(double theta, Ex c_star) {
  require(theta > 0 && theta < M_PI / 2, ErrorKind::InvalidInput, "cone angle must lie in (0, pi/2)");
  PhaseRegion r;
  r.kind_ = Kind::Cone;
  r.theta_ = theta;
  r.c_star_ = c_star;
  return r;
}

PhaseRegion PhaseRegion::complement(const PhaseRegion& a) {
  PhaseRegion r;
  r.kind_ = Kind::Complement;
  r.parts_ = {std::make_shared<PhaseRegion>(a)};
  return r;
}

PhaseRegion PhaseRegion::intersection(const PhaseRegion& a, const PhaseRegion& b) {
  PhaseRegion r;
  r.kind_ = Kind::Intersection;
  r.parts_ = {std::make_shared<PhaseRegion>(a), std::make_shared<PhaseRegion>(b)};
  return r;
}

PhaseRegion PhaseRegion::box(const PhasePoint& lo, const PhasePoint& hi) {
  PhaseRegion r;
  r.kind_ = Kind::Box;
  r.lo_ = lo;
  r.hi_ = hi;
  return r;
}

bool PhaseRegion::contains(const PhasePoint& p, double eps) const {
  switch (kind_) {
    case Kind::Cone: {
      double c = c_star_.is_const() ? c_star_->c.real() : evaluate_at(c_star_, p, eps).real();
      return cone_membership(p, theta_, c);
    }
    case Kind::Complement:
      return !parts_[0]->contains(p, eps);
    case Kind::Intersection:
      return parts_[0]->contains(p, eps) && parts_[1]->contains(p, eps);
    case Kind::Box:
      for (int v = 0; v < kNumVars; ++v)
        if (p[v] < lo_[v] || p[v] > hi_[v]) return false;
      return true;
  }
  return false;
}

std::string PhaseRegion::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Cone:
      os << "cone(" << theta_ * 180 / M_PI << "deg)";
      break;
    case Kind::Complement:
      os << "not " << parts_[0]->describe();
      break;
    case Kind::Intersection:
      os << parts_[0]->describe() << " and " << parts_[1]->describe();
      break;
    case Kind::Box:
      os << "box";
      break;
  }
  return os.str();
}

double sigma_distance(const PhasePoint& p, double zeta, double c) {
  return zeta * zeta - p[TAU] * p[TAU] / (c * c) + p[XI] * p[XI] + p[ETA] * p[ETA];
}

bool on_sigma(const PhasePoint& p, double zeta, double c, double tol) {
  double r2 = zeta * zeta + p[TAU] * p[TAU] + p[XI] * p[XI] + p[ETA] * p[ETA];
  return std::abs(sigma_distance(p, zeta, c)) <= tol * r2;
}

void CutoffAngles::validate() const {
  require(0 < theta1 && theta1 < gamma1 && gamma1 < gamma2 && gamma2 < theta2 && theta2 < 90,
          ErrorKind::InvalidInput, "cutoff angles must satisfy 0 < theta1 < gamma1 < gamma2 < theta2 < 90");
}

Symbol build_chi(const CutoffAngles& a, const Ex& speed, int n_lat) {
  a.validate();
  Ex xi = n_lat == 2 ? sqrt(pow(var(XI), 2) + pow(var(ETA), 2)) : var(XI);
  Ex f = speed * xi / var(TAU);
  Symbol s(join_abs(f, std::sin(deg(a.gamma1)), std::sin(deg(a.gamma2))), 0.0, n_lat, true);
  return s;
}

std::string EllipticityReport::text() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "region: " << region << "\n";
  os << "samples: " << samples << "\n";
  os << "lower_bound:";
  for (double v : lower_bound.values()) os << " " << v;
  os << "\nradius:";
  for (double v : radius.values()) os << " " << v;
  os << "\nreciprocal_class: " << net_class_name(reciprocal_class) << "\n";
  os << "verdict: " << (elliptic ? "elliptic" : "non-elliptic") << "\n";
  return os.str();
}

namespace {

// Unit-sphere directions in the given number of frequency dimensions.
std::vector<std::vector<double>> sphere(int dims, int n) {
  std::vector<std::vector<double>> out;
  if (dims == 1) return {{1.0}, {-1.0}};
  if (dims == 2) {
    for (int k = 0; k < n; ++k) {
      double p = 2 * M_PI * k / n;
      out.push_back({std::cos(p), std::sin(p)});
    }
    return out;
  }
  const double golden = M_PI * (3 - std::sqrt(5.0));
  for (int k = 0; k < n; ++k) {
    double y = 1 - 2.0 * (k + 0.5) / n, r = std::sqrt(1 - y * y);
    out.push_back({std::cos(golden * k) * r, y, std::sin(golden * k) * r});
  }
  return out;
}

}  // namespace

namespace {

EllipticityReport probe_core(const Symbol& s, const PhaseRegion& region, const EpsGrid& grid,
                             const EllipticityOptions& opt, const std::function<Points(double)>& make_points) {
  require(grid.size() > 0, ErrorKind::InvalidInput, "ellipticity probe needs an eps grid");
  const auto fv = s.freq_vars();
  std::vector<double> radii = opt.radii;
  if (radii.empty())
    for (double r = 1; r <= 512; r *= 2) radii.push_back(r);
  std::vector<double> lower, rad;
  std::size_t used = 0;
  for (std::size_t ie = 0; ie < grid.size(); ++ie) {
    const double eps = grid[ie];
    Points pts = make_points(eps);
    const std::size_t n = pts.size();
    std::vector<double> w, r;
    std::vector<char> keep(n, 0);
    PhasePoint p{};
    for (std::size_t i = 0; i < n; ++i) {
      for (int v = 0; v < kNumVars; ++v) p[v] = pts.c[v].empty() ? 0.0 : pts.c[v][pts.c[v].size() == 1 ? 0 : i];
      keep[i] = region.contains(p, eps);
    }
    auto vals = evaluate(s.e, pts);
    for (std::size_t i = 0; i < n; ++i) {
      if (!keep[i]) continue;
      double r2 = 0;
      for (int v : fv) {
        double c = pts.c[v].empty() ? 0.0 : pts.c[v][pts.c[v].size() == 1 ? 0 : i];
        r2 += c * c;
      }
      double a = std::abs(vals[i]);
      if (!std::isfinite(a)) a = 0;
      w.push_back(opt.homogeneous ? a : a * std::pow(1 + r2, -opt.m / 2));
      r.push_back(std::sqrt(r2));
    }
    require(!w.empty(), ErrorKind::InsufficientData, "no sample points fall inside the region");
    used = std::max(used, w.size());
    if (opt.homogeneous) {
      lower.push_back(*std::min_element(w.begin(), w.end()));
      rad.push_back(1.0);
      continue;
    }
    std::vector<double> lr(radii.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t k = 0; k < radii.size(); ++k)
        if (r[i] >= radii[k]) lr[k] = std::min(lr[k], w[i]);
    double best = 0;
    for (double v : lr)
      if (std::isfinite(v)) best = std::max(best, v);
    double lb = 0, rr = radii.back();
    for (std::size_t k = 0; k < radii.size(); ++k)
      if (std::isfinite(lr[k]) && lr[k] > 0 && lr[k] >= 0.5 * best) {
        lb = lr[k];
        rr = radii[k];
        break;
      }
    lower.push_back(lb);
    rad.push_back(rr);
  }
  EllipticityReport rep;
  rep.region = region.describe();
  rep.samples = used;
  rep.lower_bound = EpsNet(grid, lower, "lower_bound");
  rep.radius = EpsNet(grid, rad, "radius");
  bool positive = std::all_of(lower.begin(), lower.end(), [](double v) { return v > 0; });
  if (!positive) {
    rep.reciprocal_class = NetClass::Unclassified;
    rep.elliptic = false;
    return rep;
  }
  std::vector<double> inv;
  for (double v : lower) inv.push_back(1.0 / v);
  try {
    rep.reciprocal_class = classify_net(EpsNet(grid, inv)).cls;
    rep.elliptic = rep.reciprocal_class == NetClass::Lsc;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData) throw;
    rep.reciprocal_class = NetClass::Unset;
    rep.elliptic = true;
  }
  return rep;
}

Points homogeneous_points(const SampleBox& box, const std::vector<int>& fv, int samples, double eps) {
  Points pts;
  pts.eps = eps;
  SampleBox sb = box;
  for (int v : fv) sb.axis(v, 0, 0, 1);
  Points sp = sb.points(eps);
  auto dirs = sphere(int(fv.size()), samples);
  for (std::size_t i = 0; i < sb.size(); ++i)
    for (auto& d : dirs)
      for (int v = 0; v < kNumVars; ++v) {
        double val = sp.c[v].empty() ? 0.0 : sp.c[v][sp.c[v].size() == 1 ? 0 : i];
        for (std::size_t k = 0; k < fv.size(); ++k)
          if (fv[k] == v) val = d[k];
        pts.c[v].push_back(val);
      }
  return pts;
}

}  // namespace

EllipticityReport ellipticity_probe(const Symbol& s, const PhaseRegion& region, const SampleBox& box,
                                    const EpsGrid& grid, const EllipticityOptions& opt) {
  const auto fv = s.freq_vars();
  return probe_core(s, region, grid, opt, [&](double eps) {
    return opt.homogeneous ? homogeneous_points(box, fv, opt.angular_samples, eps) : box.points(eps);
  });
}

EllipticityReport ellipticity_probe(const Symbol& s, const PhaseRegion& region, const std::vector<PhasePoint>& points,
                                    const EpsGrid& grid, const EllipticityOptions& opt) {
  require(!points.empty(), ErrorKind::InsufficientData, "no sample points given");
  return probe_core(s, region, grid, opt, [&](double eps) {
    Points pts;
    pts.eps = eps;
    for (auto& p : points)
      for (int v = 0; v < kNumVars; ++v) pts.c[v].push_back(p[v]);
    return pts;
  });
}

}  // namespace psido
