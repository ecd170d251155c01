#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "psido/expr.hpp"
#include "psido/mollifier.hpp"
#include "psido/scalenets.hpp"

namespace psido {

// Periodic Hoelder samples on [0,Lx) x [0,Lz), stored row-major with z as
// the row index: samples[iz * nx + ix].
struct HolderModel {
  int nx = 0, nz = 1;
  double mu = 1.0;
  double lower = 0.0, upper = 0.0;
  double Lx = 2 * 3.14159265358979323846, Lz = 2 * 3.14159265358979323846;
  std::vector<double> samples;

  double dx() const { return Lx / nx; }
  double dz() const { return Lz / nz; }
  double at(int ix, int iz) const { return samples[std::size_t(iz) * nx + ix]; }
  void validate() const;
};

// Header "HOLDER v1 nx nz mu lower upper [Lx Lz]" then little-endian float64 samples.
HolderModel read_holder_model(const std::string& path);
void write_holder_model(const std::string& path, const HolderModel& m);

struct RegularizedField {
  int nx = 0, nz = 1;
  double Lx = 0, Lz = 0, eps = 0, omega = 0;
  std::vector<double> samples;
  std::vector<TrigMode> modes;  // nonzero spectral content, physical wavenumbers
  double min() const;
  double max() const;
};

// u_eps = u * phi_{1/omega}, computed as the periodic convolution of the
// trigonometric interpolant (exact spectral multiplication).
RegularizedField regularize(const HolderModel& u, const EpsNet& omega, const Mollifier& phi,
                            double eps);

// Same convolution by direct spatial quadrature with the periodized kernel.
// Slow; used as an independent check.
double regularize_by_quadrature(const HolderModel& u, double omega, const Mollifier& phi, int ix,
                                int iz = 0);

// Apply f pointwise to the samples before regularization (e.g. 1/c).
HolderModel map_samples(const HolderModel& u, double (*f)(double));

struct RegularizationReport {
  EpsGrid grid;
  std::vector<double> inf, sup;
  double delta = 0.05;
  bool within_bounds = false;
  double eps_star = 0;  // strong positivity holds for all grid eps <= eps_star
};

RegularizationReport regularization_report(const HolderModel& u, const EpsNet& omega,
                                           const Mollifier& phi, double delta = 0.05);

struct RateFit {
  std::array<int, 2> alpha{};  // derivative orders in x and z
  double exponent = 0;         // fitted d log ||d^alpha u_eps||_inf / d log omega
  double expected = 0;
  double residual = 0;
};

struct RegularizationRates {
  bool identically_zero = false;
  std::vector<RateFit> derivative;  // |alpha| = 0..max_order
  double error_exponent = 0;        // sup |u_eps - u| against omega
  double error_residual = 0;
};

RegularizationRates regularization_rates(const HolderModel& u, const EpsNet& omega,
                                         const Mollifier& phi, int max_order = 2);

// Symbol-ready field: one band-limited mode list per grid eps.
std::shared_ptr<const TrigField> regularized_family(const std::string& name, const HolderModel& u,
                                                   const EpsNet& omega, const Mollifier& phi);

}  // namespace psido
