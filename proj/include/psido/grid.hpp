#pragma once

#include <complex>
#include <string>
#include <vector>

namespace psido {

// Samples on a uniform periodic grid. One axis is x; two axes are (t, x)
// stored row-major with x fastest. Sample j on an axis sits at j * spacing.
struct GridField {
  std::vector<int> n;
  std::vector<double> d;
  double z = 0;
  double eps = 1;
  std::vector<std::complex<double>> values;

  GridField() = default;
  GridField(std::vector<int> sizes, std::vector<double> spacings, double depth = 0, double e = 1);

  int ndim() const { return int(n.size()); }
  std::size_t size() const { return values.size(); }
  int nx() const { return n.back(); }
  double dx() const { return d.back(); }
  double period(int axis) const { return n[axis] * d[axis]; }
  std::vector<double> coords(int axis) const;
  // Angular frequencies 2 pi k / period in FFT bin order.
  std::vector<double> frequencies(int axis) const;
  void validate() const;
  bool same_grid(const GridField& o) const;
};

double l2_norm(const GridField& u);  // discrete, weighted by the cell volume
std::complex<double> inner(const GridField& u, const GridField& v);

// "GRID v1 ndim n.. dx.. z eps" then interleaved little-endian float64 pairs.
void write_grid(const std::string& path, const GridField& u);
GridField read_grid(const std::string& path);

}  // namespace psido
