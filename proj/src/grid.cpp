#include "psido/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "psido/errors.hpp"
#include "psido/fft.hpp"

namespace psido {

GridField::GridField(std::vector<int> sizes, std::vector<double> spacings, double depth, double e)
    : n(std::move(sizes)), d(std::move(spacings)), z(depth), eps(e) {
  require(n.size() == d.size() && (n.size() == 1 || n.size() == 2), ErrorKind::InvalidInput,
          "grid fields have one or two axes");
  std::size_t total = 1;
  for (int k : n) total *= std::size_t(std::max(k, 0));
  values.assign(total, 0.0);
}

std::vector<double> GridField::coords(int axis) const {
  std::vector<double> c(n[axis]);
  for (int j = 0; j < n[axis]; ++j) c[j] = j * d[axis];
  return c;
}

std::vector<double> GridField::frequencies(int axis) const {
  std::vector<double> f(n[axis]);
  const double base = 2 * M_PI / period(axis);
  for (int k = 0; k < n[axis]; ++k) f[k] = base * fft_index(k, n[axis]);
  return f;
}

void GridField::validate() const {
  require(n.size() == d.size() && (n.size() == 1 || n.size() == 2), ErrorKind::InvalidInput,
          "grid fields have one or two axes");
  std::size_t total = 1;
  for (std::size_t a = 0; a < n.size(); ++a) {
    require(is_pow2(n[a]), ErrorKind::InvalidInput, "grid sizes must be powers of two");
    require(d[a] > 0 && std::isfinite(d[a]), ErrorKind::InvalidInput, "grid spacing must be positive");
    total *= std::size_t(n[a]);
  }
  require(values.size() == total, ErrorKind::InvalidInput, "grid sample count does not match its shape");
  for (auto& v : values)
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorKind::InvalidInput,
            "grid field has non-finite samples");
}

bool GridField::same_grid(const GridField& o) const {
  if (n != o.n) return false;
  for (std::size_t a = 0; a < d.size(); ++a)
    if (std::abs(d[a] - o.d[a]) > 1e-12 * d[a]) return false;
  return true;
}

double l2_norm(const GridField& u) {
  double vol = 1, s = 0;
  for (double h : u.d) vol *= h;
  for (auto& v : u.values) s += std::norm(v);
  return std::sqrt(s * vol);
}

std::complex<double> inner(const GridField& u, const GridField& v) {
  require(u.same_grid(v), ErrorKind::InvalidInput, "inner product of fields on different grids");
  double vol = 1;
  for (double h : u.d) vol *= h;
  std::complex<double> s = 0;
  for (std::size_t i = 0; i < u.values.size(); ++i) s += u.values[i] * std::conj(v.values[i]);
  return s * vol;
}

void write_grid(const std::string& path, const GridField& u) {
  u.validate();
  std::ofstream f(path, std::ios::binary);
  require(bool(f), ErrorKind::Io, "cannot write " + path);
  std::ostringstream h;
  h << std::setprecision(17) << "GRID v1 " << u.ndim();
  for (int k : u.n) h << " " << k;
  for (double s : u.d) h << " " << s;
  h << " " << u.z << " " << u.eps << "\n";
  f << h.str();
  std::vector<double> buf(2 * u.values.size());
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    buf[2 * i] = u.values[i].real();
    buf[2 * i + 1] = u.values[i].imag();
  }
  // Hosts are little-endian; the format is too.
  f.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size() * sizeof(double)));
  require(bool(f), ErrorKind::Io, "short write to " + path);
}

GridField read_grid(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(bool(f), ErrorKind::Io, "cannot open " + path);
  std::string line;
  std::getline(f, line);
  std::istringstream h(line);
  std::string magic, ver;
  int nd = 0;
  h >> magic >> ver >> nd;
  require(magic == "GRID" && ver == "v1", ErrorKind::InvalidInput, path + ": not a GRID v1 file");
  require(nd == 1 || nd == 2, ErrorKind::InvalidInput, path + ": grid fields have one or two axes");
  std::vector<int> n(nd);
  std::vector<double> d(nd);
  for (auto& k : n) h >> k;
  for (auto& s : d) h >> s;
  double z = 0, eps = 1;
  h >> z >> eps;
  require(bool(h), ErrorKind::InvalidInput, path + ": malformed GRID header");
  for (int k : n) require(is_pow2(k), ErrorKind::InvalidInput, path + ": grid sizes must be powers of two");
  GridField u(n, d, z, eps);
  std::vector<double> buf(2 * u.values.size());
  f.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size() * sizeof(double)));
  require(f.gcount() == std::streamsize(buf.size() * sizeof(double)), ErrorKind::InvalidInput,
          path + ": truncated sample data");
  for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = {buf[2 * i], buf[2 * i + 1]};
  u.validate();
  return u;
}

}  // namespace psido
