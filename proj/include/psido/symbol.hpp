#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "psido/eval.hpp"
#include "psido/expr.hpp"
#include "psido/scalenets.hpp"

namespace psido {

using MultiIndex = std::array<int, kNumVars>;
using PhasePoint = std::array<double, kNumVars>;

int total_order(const MultiIndex& a);
MultiIndex mi(std::initializer_list<std::pair<int, int>> var_orders);

// Symbol of order m in the class with type (rho, delta). Space variables are
// x (and y when n_lat == 2); frequencies are xi (eta) and tau when has_tau.
struct Symbol {
  Ex e;
  double m = 0;
  double rho = 1, delta = 0;
  int n_lat = 1;
  bool has_tau = false;
  int budget = 12;

  Symbol() = default;
  Symbol(Ex ex, double order, int nlat = 1, bool tau = false)
      : e(ex), m(order), n_lat(nlat), has_tau(tau) {}

  std::vector<int> freq_vars() const;
  std::vector<int> space_vars() const;
  Symbol with(Ex ex, double order) const;
};

Symbol operator+(const Symbol& a, const Symbol& b);
Symbol operator*(const Symbol& a, const Symbol& b);
Symbol scale(const Symbol& a, cplx c);

// Structural derivative; raises budget-error past the derivative budget.
Ex derivative_expr(const Ex& e, const MultiIndex& a);
Symbol derivative(const Symbol& s, const MultiIndex& a);

struct EvalOptions {
  std::size_t max_nodes = 400000;  // beyond this the finite-difference path is used
  bool force_finite_difference = false;
};

struct DerivValue {
  cplx value;
  bool finite_difference = false;
};

DerivValue eval_with_derivs(const Symbol& s, const MultiIndex& a, const PhasePoint& p, double eps,
                            const EvalOptions& opt = {});

// Fourth-order central differences with step 1e-3 (1 + |coord|) and one
// Richardson step, applied one variable at a time.
cplx finite_difference(const Ex& e, const MultiIndex& a, const PhasePoint& p, double eps);

// Tensor grid of sample points. Axes with count 1 sit at lo.
struct SampleBox {
  PhasePoint lo{}, hi{};
  std::array<int, kNumVars> count{1, 1, 1, 1, 1, 1};

  void axis(int v, double a, double b, int n) {
    lo[v] = a;
    hi[v] = b;
    count[v] = n;
  }
  std::size_t size() const;
  Points points(double eps) const;
};

double seminorm(const Symbol& s, const MultiIndex& a, const SampleBox& box, double eps);

struct OrderFitOptions {
  MultiIndex alpha{};
  std::vector<PhasePoint> rays;       // frequency directions (space entries ignored)
  std::vector<double> magnitudes;     // |frequency| samples, >= 3 octaves
  std::vector<PhasePoint> bases;      // space / depth coordinates (frequency entries ignored)
  double eps = 1.0;
  std::optional<EpsGrid> prefactor_grid;
};

struct OrderFit {
  bool identically_zero = false;
  double slope = 0, intercept = 0, residual = 0;
  std::vector<double> magnitudes, values;
  std::optional<EpsNet> prefactor;
  NetClass prefactor_class = NetClass::Unset;
};

OrderFit fit_order(const Symbol& s, const OrderFitOptions& opt);

// Frequency coordinates given as nets over one grid.
struct GeneralizedPoint {
  PhasePoint base{};
  std::vector<int> freq_vars;
  std::vector<EpsNet> freq;
};

struct PointValue {
  EpsGrid grid;
  std::vector<cplx> values;
  EpsNet modulus;
  NetClass cls = NetClass::Unset;
};

PointValue point_value(const Symbol& s, const GeneralizedPoint& p);
// Difference of two point values classified; negligible when the inputs agree.
NetClass difference_class(const PointValue& a, const PointValue& b);

// Cutoff equal to 1 for |frequency| <= radius/2 and 0 beyond radius.
Ex origin_cutoff(const std::vector<int>& freq_vars, double radius = 1.0);
Symbol excise_origin(const Symbol& s, double radius = 1.0);

std::string serialize_symbol(const Symbol& s);
Symbol deserialize_symbol(const std::string& text);

}  // namespace psido
