#pragma once

#include <optional>
#include <vector>

#include "psido/scalenets.hpp"
#include "psido/symbol.hpp"

namespace psido {

// Terms a_0, a_1, ... with strictly decreasing orders. The expansion stands
// for the formal series; `truncation` is the number of terms kept.
struct TruncatedExpansion {
  std::vector<Symbol> terms;
  int truncation = 0;
  std::vector<EpsNet> excision_radii;  // lambda_j, filled by asymptotic_sum

  double order() const { return terms.empty() ? 0.0 : terms.front().m; }
  // Plain sum of the kept terms.
  Symbol partial_sum(int upto = -1) const;
  void validate() const;
};

// Left-quantized composition a # b truncated after N terms (N >= 1).
TruncatedExpansion compose(const Symbol& a, const Symbol& b, int N);
// Shortcut for compose(...).partial_sum().
Symbol compose_sum(const Symbol& a, const Symbol& b, int N);

TruncatedExpansion adjoint(const Symbol& a, int N);
Symbol adjoint_sum(const Symbol& a, int N);

// psi(s) = 1 - J(s; 1, 2) on |s| = lambda |zeta|, as an expression of the
// frequency variables. lambda may be an eps-net expression.
Ex excision_profile(const std::vector<int>& freq_vars, const Ex& lambda);

struct SumOptions {
  std::optional<EpsGrid> grid;  // when absent the radii are constants probed at eps = 1
  double probe_radius = 64;     // frequency half-width of the seminorm probe
  int probe_points = 9;
};

// Excision radii lambda_j = (2^j max(1, probe_j))^-1, clamped non-increasing in j.
std::vector<EpsNet> excision_radii(const TruncatedExpansion& e, const SumOptions& opt = {});

// Realizes sum_j psi(lambda_j zeta) a_j. Explicit nets override the probe.
Symbol asymptotic_sum(TruncatedExpansion& e, const SumOptions& opt = {});
Symbol asymptotic_sum(TruncatedExpansion& e, const std::vector<EpsNet>& radii);

}  // namespace psido

namespace psido {

// Single composition / adjoint term of total lateral order k.
Ex compose_term(const Symbol& a, const Symbol& b, int k);
Ex adjoint_term(const Symbol& a, int k);

// Symbol split into grades: g[k] has order top - k (rho - delta).
struct Graded {
  Symbol base;  // carries metadata; base.m is the top order
  std::vector<Ex> g;

  Graded() = default;
  Graded(const Symbol& s, int depth = 1);

  int depth() const { return int(g.size()); }
  double order(int k) const { return base.m - k * (base.rho - base.delta); }
  Symbol grade(int k) const { return base.with(k < depth() ? g[k] : Ex(0.0), order(k)); }
  Symbol total(int upto = -1) const;
  Graded truncated(int depth) const;
  // Shift so that grade 0 sits at the given top order (pads with zeros).
  Graded retopped(double top) const;
};

Graded operator+(const Graded& a, const Graded& b);
Graded operator-(const Graded& a, const Graded& b);
Graded operator*(const Ex& f, const Graded& a);  // pointwise, keeps grades
Graded graded_compose(const Graded& a, const Graded& b, int depth);
Graded graded_adjoint(const Graded& a, int depth);
// (a + a*) / 2 truncated to the given depth.
Graded symmetrize(const Graded& a, int depth);
Graded graded_diff(const Graded& a, int var);

}  // namespace psido
