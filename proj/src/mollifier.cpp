#include "psido/mollifier.hpp"

extern "C" {
#include <quadmath.h>
}

#include <cmath>

#include "psido/errors.hpp"
#include "psido/profiles.hpp"

namespace psido {

namespace {

using quad = __float128;

quad pi_q() { return 4 * atanq(quad(1)); }

quad profile_q(quad k) {
  if (k < 0) k = -k;
  if (k <= 1) return 1;
  if (k >= 2) return 0;
  quad h = quad(1) / (k - 1) - quad(1) / (2 - k);
  if (h > 11000) return 1;
  if (h < -11000) return 0;
  return 1 - 1 / (1 + expq(h));
}

// Smallest table half-width whose truncated tail keeps moment `budget` below 1e-13.
int table_half_width(int budget) {
  for (int x = 256;; x += 64) {
    double t = std::pow(double(x), budget) * std::exp(-std::sqrt(2.0 * x)) * 4.0 * std::sqrt(2.0 * x);
    if (t < 1e-13) return x;
  }
}

}  // namespace

double Mollifier::profile(double k) const { return join(std::abs(k), inner, outer); }

Mollifier build_mollifier(int budget) {
  require(budget >= 2, ErrorKind::InvalidInput, "mollifier moment budget must be at least 2");
  require(budget <= 10, ErrorKind::InvalidInput, "mollifier moment budget above 10 is not supported");
  Mollifier m;
  m.moment_budget = budget;
  m.dx = 1.0;
  const int X = table_half_width(budget);
  m.half_width = X;
  long P = 1;
  while (P < X + 4608) P *= 2;
  // Trapezoid rule in frequency with step 2*pi/P; its aliasing error is phi(x +- P).
  std::vector<quad> cosine(P);
  for (long r = 0; r < P; ++r) cosine[r] = cosq(2 * pi_q() * quad(r) / quad(P));
  const quad dk = 2 * pi_q() / quad(P);
  std::vector<quad> prof;
  for (long mm = 0;; ++mm) {
    quad p = profile_q(dk * quad(mm));
    if (p == 0) break;
    prof.push_back(p);
  }
  std::vector<quad> phi(X + 1);
  for (int j = 0; j <= X; ++j) {
    quad s = prof[0];
    for (std::size_t mm = 1; mm < prof.size(); ++mm) s += 2 * prof[mm] * cosine[(long(mm) * j) % P];
    phi[j] = s * dk / (2 * pi_q());
  }
  m.spatial.resize(X + 1);
  for (int j = 0; j <= X; ++j) m.spatial[j] = double(phi[j]);
  m.moments.assign(budget + 1, 0.0);
  for (int a = 0; a <= budget; a += 2) {
    quad s = phi[0] * (a == 0 ? 1 : 0);
    for (int j = 1; j <= X; ++j) s += 2 * powq(quad(j), a) * phi[j];
    m.moments[a] = double(s);
  }
  return m;
}

}  // namespace psido
