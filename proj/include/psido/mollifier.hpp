#pragma once

#include <vector>

namespace psido {

// Mollifier with spectral profile 1 on [-1,1], 0 outside [-2,2] and the
// shared smooth join in between. Its spatial kernel is band-limited, so the
// integer-spaced table reproduces mass and moments exactly up to truncation.
struct Mollifier {
  double inner = 1.0, outer = 2.0;
  int moment_budget = 0;
  double dx = 1.0;
  int half_width = 0;            // table covers x = -half_width..half_width
  std::vector<double> spatial;   // phi(j*dx), j = 0..half_width (even kernel)
  std::vector<double> moments;   // discrete moments 0..moment_budget

  double profile(double k) const;
  double mass() const { return moments.empty() ? 0.0 : moments[0]; }
};

// Throws invalid-input for budget < 2.
Mollifier build_mollifier(int moment_budget);

}  // namespace psido
