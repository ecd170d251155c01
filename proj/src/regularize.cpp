#include "psido/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "psido/errors.hpp"
#include "psido/fft.hpp"

namespace psido {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_omega(const EpsNet& omega) {
  NetClass c = omega.net_class();
  if (c == NetClass::Unset) c = classify_net(omega).cls;
  require(c == NetClass::Lsc, ErrorKind::InvalidInput,
          std::string("regularization scale must be lsc, got ") + net_class_name(c));
}

cplx ipow(cplx b, int k) {
  cplx r = 1.0;
  for (int i = 0; i < k; ++i) r *= b;
  return r;
}

bool constant_samples(const HolderModel& u) {
  return std::all_of(u.samples.begin(), u.samples.end(),
                     [&](double v) { return v == u.samples[0]; });
}

std::vector<cplx> spectrum(const HolderModel& u) {
  std::vector<cplx> a(u.samples.begin(), u.samples.end());
  fft_forward(a, {u.nz, u.nx});
  const double inv = 1.0 / double(a.size());
  for (auto& v : a) v *= inv;
  return a;
}

// Spectral multiplier of the mollifier at physical wavenumbers.
std::vector<double> multiplier(const HolderModel& u, const Mollifier& phi, double omega) {
  std::vector<double> f(std::size_t(u.nx) * u.nz);
  for (int iz = 0; iz < u.nz; ++iz) {
    double kz = 2 * kPi * fft_index(iz, u.nz) / u.Lz;
    double pz = u.nz > 1 ? phi.profile(kz / omega) : 1.0;
    for (int ix = 0; ix < u.nx; ++ix) {
      double kx = 2 * kPi * fft_index(ix, u.nx) / u.Lx;
      f[std::size_t(iz) * u.nx + ix] = pz * phi.profile(kx / omega);
    }
  }
  // Kept content must stay below Nyquist so the result is real and unaliased.
  auto nyq_ok = [&](int n, double L) { return n == 1 || phi.outer * omega < kPi * n / L; };
  require(nyq_ok(u.nx, u.Lx) && nyq_ok(u.nz, u.Lz), ErrorKind::InvalidInput,
          "sample grid too coarse for the regularization scale");
  return f;
}

std::vector<double> real_backward(std::vector<cplx> a, int nz, int nx) {
  fft_backward(a, {nz, nx});
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i].real();
  return r;
}

// Spatial kernel from its Fourier integral. The even extension of the
// profile is smooth with compact support, so the trapezoid rule over the
// whole line converges spectrally; its only error is aliasing at 2*pi/h.
double kernel_direct(const Mollifier& phi, double x) {
  const int n = 1024;
  const double h = phi.outer / n;
  double s = 0.5;
  for (int i = 1; i < n; ++i) s += phi.profile(i * h) * std::cos(i * h * x);
  return s * h / kPi;
}

constexpr double kKernelReach = 400.0;

}  // namespace

void HolderModel::validate() const {
  require(nx > 0 && nz > 0 && is_pow2(nx) && is_pow2(nz), ErrorKind::InvalidInput,
          "model sizes must be powers of two");
  require(std::size_t(nx) * nz == samples.size(), ErrorKind::InvalidInput,
          "model sample count does not match header");
  require(mu > 0 && mu <= 1, ErrorKind::InvalidInput, "Hoelder exponent must lie in (0,1]");
  require(Lx > 0 && Lz > 0, ErrorKind::InvalidInput, "model extents must be positive");
  for (double v : samples) require(std::isfinite(v), ErrorKind::InvalidInput, "model has non-finite samples");
}

HolderModel read_holder_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(bool(f), ErrorKind::Io, "cannot open model file " + path);
  std::string line;
  std::getline(f, line);
  std::istringstream hs(line);
  std::string tag, ver;
  HolderModel m;
  hs >> tag >> ver >> m.nx >> m.nz >> m.mu >> m.lower >> m.upper;
  require(bool(hs) && tag == "HOLDER" && ver == "v1", ErrorKind::Io,
          "bad model header in " + path);
  double lx, lz;
  if (hs >> lx >> lz) {
    m.Lx = lx;
    m.Lz = lz;
  }
  m.samples.resize(std::size_t(m.nx) * m.nz);
  for (auto& v : m.samples) {
    unsigned char b[8];
    require(bool(f.read(reinterpret_cast<char*>(b), 8)), ErrorKind::Io, "truncated model file " + path);
    std::uint64_t u = 0;
    for (int i = 7; i >= 0; --i) u = (u << 8) | b[i];
    std::memcpy(&v, &u, 8);
  }
  m.validate();
  return m;
}

void write_holder_model(const std::string& path, const HolderModel& m) {
  m.validate();
  std::ofstream f(path, std::ios::binary);
  require(bool(f), ErrorKind::Io, "cannot write " + path);
  std::ostringstream hs;
  hs.precision(17);
  hs << "HOLDER v1 " << m.nx << " " << m.nz << " " << m.mu << " " << m.lower << " " << m.upper
     << " " << m.Lx << " " << m.Lz << "\n";
  f << hs.str();
  for (double v : m.samples) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (u >> (8 * i)) & 0xff;
    f.write(reinterpret_cast<const char*>(b), 8);
  }
}

double RegularizedField::min() const { return *std::min_element(samples.begin(), samples.end()); }
double RegularizedField::max() const { return *std::max_element(samples.begin(), samples.end()); }

RegularizedField regularize(const HolderModel& u, const EpsNet& omega, const Mollifier& phi,
                            double eps) {
  u.validate();
  check_omega(omega);
  RegularizedField r;
  r.nx = u.nx;
  r.nz = u.nz;
  r.Lx = u.Lx;
  r.Lz = u.Lz;
  r.eps = eps;
  r.omega = omega.at(eps);
  if (constant_samples(u)) {
    r.samples = u.samples;
    r.modes = {TrigMode{0, 0, u.samples[0]}};
    return r;
  }
  auto a = spectrum(u);
  auto f = multiplier(u, phi, r.omega);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] *= f[i];
    if (a[i] != cplx(0.0)) {
      int ix = int(i % u.nx), iz = int(i / u.nx);
      r.modes.push_back({2 * kPi * fft_index(ix, u.nx) / u.Lx, 2 * kPi * fft_index(iz, u.nz) / u.Lz, a[i]});
    }
  }
  r.samples = real_backward(std::move(a), u.nz, u.nx);
  return r;
}

double regularize_by_quadrature(const HolderModel& u, double omega, const Mollifier& phi, int ix,
                                int iz) {
  require(u.nz == 1 || iz >= 0, ErrorKind::InvalidInput, "bad sample index");
  const double dx = u.dx(), dz = u.dz();
  const double x0 = ix * dx, z0 = iz * dz;
  const double reach = kKernelReach / omega;
  auto periodized = [&](double d, double L) {
    double s = 0;
    for (int img = -int(reach / L) - 1; img <= int(reach / L) + 1; ++img) {
      double y = omega * (d + img * L);
      if (std::abs(y) <= kKernelReach) s += omega * kernel_direct(phi, y);
    }
    return s;
  };
  std::vector<double> wx(u.nx);
  for (int j = 0; j < u.nx; ++j) wx[j] = periodized(x0 - j * dx, u.Lx) * dx;
  std::vector<double> wz(u.nz, 1.0);
  if (u.nz > 1) {
    for (int j = 0; j < u.nz; ++j) {
      wz[j] = periodized(z0 - j * dz, u.Lz) * dz;
    }
  }
  double acc = 0;
  for (int jz = 0; jz < u.nz; ++jz)
    for (int jx = 0; jx < u.nx; ++jx) acc += u.at(jx, jz) * wx[jx] * wz[jz];
  return acc;
}

HolderModel map_samples(const HolderModel& u, double (*f)(double)) {
  HolderModel r = u;
  for (auto& v : r.samples) v = f(v);
  double a = f(u.lower), b = f(u.upper);
  r.lower = std::min(a, b);
  r.upper = std::max(a, b);
  return r;
}

RegularizationReport regularization_report(const HolderModel& u, const EpsNet& omega,
                                           const Mollifier& phi, double delta) {
  RegularizationReport rep;
  rep.grid = omega.grid();
  rep.delta = delta;
  rep.within_bounds = true;
  for (double e : omega.grid().values()) {
    auto r = regularize(u, omega, phi, e);
    rep.inf.push_back(r.min());
    rep.sup.push_back(r.max());
    if (r.min() < u.lower * (1 - delta) || r.max() > u.upper * (1 + delta)) rep.within_bounds = false;
  }
  rep.eps_star = 0;
  for (std::size_t i = rep.grid.size(); i-- > 0;) {
    if (rep.inf[i] >= u.lower * (1 - delta) && rep.inf[i] > 0)
      rep.eps_star = rep.grid[i];
    else
      break;
  }
  return rep;
}

RegularizationRates regularization_rates(const HolderModel& u, const EpsNet& omega,
                                         const Mollifier& phi, int max_order) {
  u.validate();
  RegularizationRates out;
  if (std::all_of(u.samples.begin(), u.samples.end(), [](double v) { return v == 0.0; })) {
    out.identically_zero = true;
    return out;
  }
  std::vector<std::array<int, 2>> alphas;
  for (int k = 0; k <= max_order; ++k)
    for (int az = 0; az <= (u.nz > 1 ? k : 0); ++az) alphas.push_back({k - az, az});
  std::vector<double> logw;
  std::vector<std::vector<double>> lognorm(alphas.size());
  std::vector<double> logerr;
  auto spec = spectrum(u);
  for (double e : omega.grid().values()) {
    double w = omega.at(e);
    logw.push_back(std::log(w));
    auto f = multiplier(u, phi, w);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      std::vector<cplx> s(spec.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        int ix = int(i % u.nx), iz = int(i / u.nx);
        cplx kx(0, 2 * kPi * fft_index(ix, u.nx) / u.Lx), kz(0, 2 * kPi * fft_index(iz, u.nz) / u.Lz);
        s[i] = spec[i] * f[i] * ipow(kx, alphas[a][0]) * ipow(kz, alphas[a][1]);
      }
      auto d = real_backward(std::move(s), u.nz, u.nx);
      double m = 0;
      for (double v : d) m = std::max(m, std::abs(v));
      lognorm[a].push_back(std::log(m));
      if (a == 0) {
        double err = 0;
        for (std::size_t i = 0; i < d.size(); ++i) err = std::max(err, std::abs(d[i] - u.samples[i]));
        logerr.push_back(std::log(err));
      }
    }
  }
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    RateFit rf;
    rf.alpha = alphas[a];
    int ord = alphas[a][0] + alphas[a][1];
    rf.expected = ord == 0 ? 0.0 : ord - u.mu;
    rf.exponent = lsq_slope(logw, lognorm[a], nullptr, &rf.residual);
    out.derivative.push_back(rf);
  }
  out.error_exponent = lsq_slope(logw, logerr, nullptr, &out.error_residual);
  return out;
}

std::shared_ptr<const TrigField> regularized_family(const std::string& name, const HolderModel& u,
                                                   const EpsNet& omega, const Mollifier& phi) {
  std::vector<std::vector<TrigMode>> modes;
  for (double e : omega.grid().values()) modes.push_back(regularize(u, omega, phi, e).modes);
  return std::make_shared<TrigField>(name, omega.grid(), std::move(modes), true);
}

}  // namespace psido
