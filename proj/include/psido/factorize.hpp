#pragma once

#include <string>

#include "psido/calculus.hpp"
#include "psido/microlocal.hpp"
#include "psido/model.hpp"

namespace psido {

enum class Branch { RootMinus, RootPlus };  // principal symbol of A_1 is -i b or +i b
const char* branch_name(Branch b);
Branch branch_from_name(const std::string& s);

// Globally elliptic continuation of sqrt(a): equal to sqrt(a) where
// |c xi / tau| <= sin(gamma2) and to sqrt(tau^2/c^2 + xi^2) past (1 + sin(gamma2)) / 2.
Ex extended_root(const WaveModel& m, const CutoffAngles& angles);
Ex extended_square(const WaveModel& m, const CutoffAngles& angles);

// chi * sqrt(a); checks ellipticity of a on I'_theta first.
Symbol principal_root(const WaveModel& m, const CutoffAngles& angles);

// Parametrix through N terms; radius r (number or net expression) sets psi(zeta / r).
// The principal grade is checked for invertibility at eps.
Graded parametrix(const Graded& a, int N, const Ex& radius, double eps = 1.0);
TruncatedExpansion parametrix(const Symbol& a, int N, const Ex& radius, double eps = 1.0);

struct LotSolution {
  Ex b1, b2;
};
// Solves -g1 = (b1 + b2) / rho and -g2 = (b1 a2 + a1 b2) / rho.
LotSolution solve_lot_system(const Ex& g1, const Ex& g2, const Ex& a1, const Ex& a2, const Ex& rho);
// Pointwise separation check |a1 - a2| >= min_sep |(tau, xi)| on the points.
void check_separation(const Ex& a1, const Ex& a2, const std::vector<PhasePoint>& pts, double eps, double min_sep);

struct FactorizeOptions {
  int N = 3;
  CutoffAngles angles;
  Branch branch = Branch::RootMinus;
};

struct FactorizationResult {
  Graded a1, a2;          // N grades each, top order 1
  Graded gamma1, gamma2;  // coefficient of d/dz (top 1) and the rest (top 2)
  int N = 0;
  Branch branch = Branch::RootMinus;
  CutoffAngles angles;
  std::string model;

  Symbol gamma(int j) const { return (j == 1 ? gamma1 : gamma2).total(); }
};

// Symbol of A_rho = d_x (1/rho) d_x - (1/rho c^2) d_t^2, graded from order 2.
Graded operator_symbol(const WaveModel& m, const CutoffAngles& angles);
FactorizationResult factorize_L(const WaveModel& m, const FactorizeOptions& opt);

struct ZerothOrderReference {
  Ex a11, a12;
};
ZerothOrderReference zeroth_order_reference(const WaveModel& m, const CutoffAngles& angles);

// Self-adjoint X with X # X = T through grades 0..N. The principal part of T
// is checked for real positivity at eps.
Graded selfadjoint_sqrt(const Graded& T, int N, double eps = 1.0);

struct OneWayOperators {
  Graded b_plus, b_minus;    // exported: chi * raw
  Graded raw_plus, raw_minus;  // before the chi cut
  Graded x_plus, x_minus;    // P12^{-1}, P22^{-1}
  Graded p12, p22;
  Symbol chi;
  bool selfadjoint = true;
  int N = 0;
};

OneWayOperators build_Bpm(const WaveModel& m, const FactorizationResult& minus, const FactorizationResult& plus,
                          bool selfadjoint);

// eta0 sqrt(tau^2 + xi^2) (1 - chi), symmetrized through `depth` grades. Depth 1 keeps
// the real symbol itself; the steep chi makes the depth-2 correction term large, so the
// solver symmetrizes at the matrix level instead (CauchyProblem::hermitian).
Symbol build_damping(const CutoffAngles& angles, const WaveModel& m, double eta0, int depth = 1);

void write_factorization(const std::string& dir, const FactorizationResult& r);
FactorizationResult read_factorization(const std::string& dir);
void write_oneway(const std::string& dir, const OneWayOperators& ops, const Symbol& damping);

}  // namespace psido
