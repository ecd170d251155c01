#pragma once

#include <optional>
#include <string>

#include "psido/expr.hpp"
#include "psido/regularize.hpp"
#include "psido/scalenets.hpp"
#include "psido/symbol.hpp"

namespace psido {

// Acoustic medium through its regularized coefficient families
// 1/c_eps^2 and 1/rho_eps as expressions in (x, z) (and eps via fields).
struct WaveModel {
  std::string name;
  Ex inv_c2;
  Ex inv_rho;
  std::optional<EpsGrid> grid;  // set when the coefficients vary with eps
  std::optional<EpsNet> omega;
  double c_ref = 1.0;           // reference speed c0
  double eps_star = 1.0;        // positivity threshold from the regularization reports

  Ex speed() const { return pow(inv_c2, -0.5); }
  Ex rho() const { return pow(inv_rho, -1.0); }
  bool constant() const;
  // Default bound C in |zeta| < C |tau|: 1 / c0.
  double zeta_bound() const { return 1.0 / c_ref; }
  // Representative eps for evaluation: 1 for eps-free models, else the finest grid value.
  double sample_eps() const { return grid ? (*grid)[grid->size() - 1] : 1.0; }
};

WaveModel analytic_model(const std::string& name, const Ex& speed, const Ex& density, double c_ref = 1.0);

struct FileModelReport {
  RegularizationReport speed, density;
};

// Regularizes 1/c^2 and 1/rho with one shared omega net.
WaveModel file_model(const std::string& name, const HolderModel& speed, const HolderModel& density,
                     const EpsNet& omega, const Mollifier& phi, FileModelReport* report = nullptr);

// a = tau^2 / c^2 - xi^2 and a_rho = a / rho.
Symbol wave_symbol(const WaveModel& m);

}  // namespace psido
