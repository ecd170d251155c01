#include "psido/profiles.hpp"

#include <cmath>

namespace psido {

namespace {

// Taylor series of g(u) = 1/(1+e^u) at u0 from g' = g^2 - g.
void logistic_taylor(double u0, int n, std::vector<double>& g) {
  g.assign(n + 1, 0.0);
  g[0] = u0 > 0 ? std::exp(-u0) / (1.0 + std::exp(-u0)) : 1.0 / (1.0 + std::exp(u0));
  for (int k = 0; k < n; ++k) {
    double sq = 0;
    for (int i = 0; i <= k; ++i) sq += g[i] * g[k - i];
    g[k + 1] = (sq - g[k]) / (k + 1);
  }
}

}  // namespace

double join(double s, double a, double b) {
  if (!(s < b)) return 0.0;
  if (s <= a) return 1.0;
  double h = 1.0 / (s - a) - 1.0 / (b - s);
  if (h > 745) return 1.0;
  if (h < -745) return 0.0;
  std::vector<double> g;
  logistic_taylor(h, 0, g);
  return 1.0 - g[0];
}

void join_taylor(double s, double a, double b, int n, std::vector<double>& c) {
  c.assign(n + 1, 0.0);
  if (!(s < b)) return;
  if (s <= a) {
    c[0] = 1.0;
    return;
  }
  const double A = s - a, B = b - s;
  const double h0 = 1.0 / A - 1.0 / B;
  if (h0 > 745) {
    c[0] = 1.0;
    return;
  }
  if (h0 < -745) return;
  // h(s0 + d) - h0 as a series in d.
  std::vector<double> H(n + 1, 0.0);
  double pa = 1.0 / A, pb = 1.0 / B;
  for (int k = 1; k <= n; ++k) {
    pa /= A;
    pb /= B;
    H[k] = ((k % 2) ? -pa : pa) - pb;
  }
  std::vector<double> g;
  logistic_taylor(h0, n, g);
  std::vector<double> pw(n + 1, 0.0), nxt(n + 1);
  pw[0] = 1.0;
  std::vector<double> out(n + 1, 0.0);
  out[0] = g[0];
  for (int k = 1; k <= n; ++k) {
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (int i = 0; i <= n; ++i) {
      if (pw[i] == 0) continue;
      for (int j = 1; i + j <= n; ++j) nxt[i + j] += pw[i] * H[j];
    }
    pw.swap(nxt);
    for (int i = 0; i <= n; ++i) out[i] += g[k] * pw[i];
  }
  c[0] = 1.0 - out[0];
  for (int i = 1; i <= n; ++i) c[i] = -out[i];
}

double join_abs_deriv(double s, double a, double b, int n) {
  double as = std::abs(s);
  if (!(as < b)) return 0.0;
  if (as <= a) return n == 0 ? 1.0 : 0.0;
  std::vector<double> c;
  join_taylor(as, a, b, n, c);
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  double v = c[n] * f;
  return (s < 0 && (n % 2)) ? -v : v;
}

double sin_deriv(double x, int n) {
  switch (n % 4) {
    case 0: return std::sin(x);
    case 1: return std::cos(x);
    case 2: return -std::sin(x);
    default: return -std::cos(x);
  }
}

double cos_deriv(double x, int n) { return sin_deriv(x, n + 1); }

}  // namespace psido
