#pragma once

#include <array>
#include <vector>

#include "psido/expr.hpp"

namespace psido {

// Evaluation points. Each coordinate array has length n or length 1
// (broadcast); an empty array means the coordinate is 0.
struct Points {
  std::array<std::vector<double>, kNumVars> c;
  double eps = 1.0;

  std::size_t size() const;
  void set(int v, std::vector<double> vals) { c[v] = std::move(vals); }
  void set(int v, double val) { c[v] = {val}; }
};

std::vector<cplx> evaluate(const Ex& e, const Points& pts);
cplx evaluate_at(const Ex& e, const std::array<double, kNumVars>& point, double eps);

}  // namespace psido
