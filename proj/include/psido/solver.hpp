#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psido/grid.hpp"
#include "psido/quantize.hpp"
#include "psido/scalenets.hpp"
#include "psido/symbol.hpp"

namespace psido {

// d_z u = (iA - B) u + f on a periodic x grid at fixed time frequency tau.
struct CauchyProblem {
  Symbol A;                        // order 1, real principal part
  std::optional<Symbol> B;         // order gamma, nonnegative real principal part
  GridField u0;
  std::vector<GridField> forcing;  // slices at increasing depths (GridField::z), linear in between
  double Z = 1.0;
  double dz = 0;                   // <= 0 picks the stability bound / 4
  double tau = 1.0;
  double gamma = 1.0, L = 8.0;
  // Realize A and B by the Hermitian parts of their matrices (self-adjoint builds).
  bool hermitian = false;
  std::vector<double> sobolev{0.0};
  std::vector<double> snapshot_depths;

  void validate() const;
};

struct EnergyTrace {
  double eps = 1, lambda = 1;
  std::vector<double> z;
  std::vector<double> s;
  std::vector<std::vector<double>> norm, pnorm;  // [s index][step]
};

struct SolveResult {
  GridField u;
  std::vector<GridField> snapshots;
  EnergyTrace trace;
  double stable_dz = 0;  // RK4 bound 2.8 / max |iA - B| on the grid
  double dz = 0;
  int steps = 0;
};

SolveResult solve_cauchy(const CauchyProblem& p, double eps, double lambda = 1.0);

// (sum <xi>^{2s} |u^|^2)^{1/2} with the Parseval normalization of l2_norm; xi along x.
double energy_norm(const GridField& u, double s);

struct EstimateMargin {
  double s = 0, p = 0, eps = 0, lambda = 0;
  double lhs = 0, rhs = 0, margin = 0;
};

// p may be +infinity (maximum over the trace).
EstimateMargin check_energy_estimate(const EnergyTrace& t, double s, double p, double lambda);
EstimateMargin check_energy_estimate(const EnergyTrace& t, double s, double p, const EpsNet& lambda);

struct GardingOptions {
  int n = 4096;
  double period = 2 * 3.14159265358979323846;
  int fields = 32;
  unsigned seed = 12345;
  double band_exponent = 0.5;  // band |k| <= eps^-band_exponent, capped at n/2 - 1
  double tau = 1.0;
  double z = 0.0;
  // Steepest-descent Rayleigh-Ritz steps from the best random field, band-limited.
  // Needs the dense matrix, so only used for n <= 2048.
  int refine_steps = 100;
};

struct GardingReport {
  EpsGrid grid;
  std::vector<double> minimum;  // min Re<Op(a)u,u> / |u|^2 per eps
  std::vector<int> band;
  EpsNet negative;              // max(0, -minimum)
  EpsNet constant;              // fitted C omega_eps, omega = log log(1/eps), covering the negative part
  double fitted_C = 0;
  NetClass cls = NetClass::Unset;  // class of 1 + negative part (zeros would fail the positivity test)
  bool nonnegative = false;
  bool pass = false;
  std::string text() const;
};

GardingReport garding_check(const Symbol& a, const EpsGrid& grid, const GardingOptions& opt = {});

// lambda_eps = 2 C omega_eps + 1 from a Garding report.
EpsNet energy_lambda(const GardingReport& g);

// Fraction of spectral energy with |c xi / tau| > sin(theta).
double cone_energy_fraction(const GridField& u, double tau, double c, double theta);

// Columns z, eps, s, norm_Hs, Pnorm_Hs, lambda.
void write_trace_csv(const std::string& path, const std::vector<EnergyTrace>& traces);

}  // namespace psido
