#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "psido/errors.hpp"
#include "psido/fft.hpp"
#include "psido/microlocal.hpp"
#include "psido/profiles.hpp"

namespace psido {

double WindowSpec::eval(double x, double period) const {
  double d = std::fmod(std::abs(x - center), period);
  d = std::min(d, period - d);
  return join(d, inner, outer);
}

std::string WavefrontResult::text() const {
  std::ostringstream os;
  os << std::setprecision(8);
  os << "orders:";
  for (int l : orders) os << " " << l;
  os << "\nexponents:";
  for (double v : exponents) os << " " << v;
  os << "\ngrowth: " << growth << "\nbound: " << bound << "\n";
  os << "verdict: " << (singular ? "singular" : "regular") << "\n";
  return os.str();
}

WavefrontResult wavefront_probe(const std::vector<GridField>& family, const EpsGrid& grid, const WindowSpec& w,
                                const ConeSpec& cone, const WavefrontOptions& opt) {
  require(family.size() == grid.size() && grid.size() >= 3, ErrorKind::InsufficientData,
          "wavefront probe needs one field per eps and at least 3 eps values");
  require(cone.half_angle > 0, ErrorKind::InvalidInput, "cone half-angle must be given and positive");
  require(w.inner > 0 && w.inner < w.outer, ErrorKind::InvalidInput, "window needs 0 < inner < outer");
  WavefrontResult res;
  for (int l = 0; l <= opt.l_max; ++l) res.orders.push_back(l);
  res.norms.assign(opt.l_max + 1, {});
  std::vector<double> logeps;
  for (std::size_t ie = 0; ie < family.size(); ++ie) {
    const GridField& u = family[ie];
    u.validate();
    const int nd = u.ndim();
    require(int(cone.direction.size()) == nd, ErrorKind::InvalidInput, "cone direction and grid dimension differ");
    require(w.outer < u.period(nd - 1) / 2, ErrorKind::InvalidInput, "window does not fit in the periodic cell");
    double dnorm = 0;
    for (double c : cone.direction) dnorm += c * c;
    dnorm = std::sqrt(dnorm);
    require(dnorm > 0, ErrorKind::InvalidInput, "cone direction is zero");

    std::vector<cplx> v = u.values;
    const auto xs = u.coords(nd - 1);
    const int nx = u.nx();
    const double px = u.period(nd - 1);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= w.eval(xs[i % nx], px);
    fft_forward(v, u.n);
    double vol = 1, dual = 1;
    for (int a = 0; a < nd; ++a) {
      vol *= u.d[a];
      dual *= 2 * M_PI / u.period(a);
    }
    std::vector<std::vector<double>> f(nd);
    for (int a = 0; a < nd; ++a) f[a] = u.frequencies(a);
    // Coefficients under the round-off floor would dominate the high-l norms.
    double peak = 0;
    for (auto& c : v) peak = std::max(peak, std::abs(c));
    const double floor = opt.noise_floor * peak;
    std::vector<double> acc(opt.l_max + 1, 0.0);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::vector<double> k(nd);
      if (nd == 1) {
        k[0] = f[0][i];
      } else {
        k[0] = f[0][i / nx];
        k[1] = f[1][i % nx];
      }
      double r2 = 0, dot = 0;
      for (int a = 0; a < nd; ++a) {
        r2 += k[a] * k[a];
        dot += k[a] * cone.direction[a];
      }
      if (r2 == 0) continue;
      double ang = std::acos(std::clamp(dot / (std::sqrt(r2) * dnorm), -1.0, 1.0));
      if (ang > cone.half_angle) continue;
      ++inside;
      if (std::abs(v[i]) <= floor) continue;
      double m = std::norm(v[i] * vol), br = 1 + r2;
      for (int l = 0; l <= opt.l_max; ++l) {
        acc[l] += m;
        m *= br;
      }
    }
    require(inside > 0, ErrorKind::InsufficientData, "cone contains no grid frequencies");
    for (int l = 0; l <= opt.l_max; ++l) res.norms[l].push_back(std::sqrt(acc[l] * dual));
    logeps.push_back(std::log(1.0 / grid[ie]));
  }
  for (int l = 0; l <= opt.l_max; ++l) {
    std::vector<double> ln;
    for (double n : res.norms[l]) ln.push_back(std::log(std::max(n, 1e-300)));
    res.exponents.push_back(lsq_slope(logeps, ln));
  }
  std::vector<double> ls(res.orders.begin(), res.orders.end());
  res.growth = lsq_slope(ls, res.exponents);
  res.bound = *std::max_element(res.exponents.begin(), res.exponents.end());
  res.singular = res.growth > opt.growth_tol;
  return res;
}

}  // namespace psido
