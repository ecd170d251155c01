#pragma once

#include <vector>

#include "psido/grid.hpp"
#include "psido/symbol.hpp"

namespace psido {

enum class QuantizePath { Auto, Dense, Multiplier, Separable };

struct QuantizeOptions {
  double tau = 1.0;  // fixed time frequency on one-axis grids
  QuantizePath path = QuantizePath::Auto;
};

// Op(a)u(x) = sum_k a(x, xi_k) u^_k e^{i x xi_k} / N on the periodic grid.
GridField quantize_apply(const Symbol& a, const GridField& u, const QuantizeOptions& opt = {});
QuantizePath quantize_path(const Symbol& a);

// One term f(x) g(zeta) of a separable symbol.
struct SeparableTerm {
  Ex space, freq;
};
// Splits a into sum f_i(x) g_i(zeta); false if some term mixes the two.
bool split_separable(const Ex& a, std::vector<SeparableTerm>& out);

// Dense matrix of Op(a) on a one-axis grid at fixed tau: (Op u)_j = sum_l M[j n + l] u_l.
struct OperatorMatrix {
  int n = 0;
  std::vector<cplx> m;
  std::vector<cplx> apply(const std::vector<cplx>& u) const;
  OperatorMatrix adjoint() const;
};
OperatorMatrix operator_matrix(const Symbol& a, int nx, double dx, double z, double eps, double tau);

}  // namespace psido
