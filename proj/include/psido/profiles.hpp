#pragma once

#include <vector>

namespace psido {

// Smooth exponential join: 1 for s <= a, 0 for s >= b, and
// 1 - 1/(1 + exp(1/(s-a) - 1/(b-s))) in between. Value 1/2 at the midpoint.
double join(double s, double a, double b);

// Taylor coefficients c_k = J^(k)(s)/k!, k = 0..n.
void join_taylor(double s, double a, double b, int n, std::vector<double>& c);

// n-th derivative of s -> J(|s|). Smooth for a > 0.
double join_abs_deriv(double s, double a, double b, int n);

// n-th derivative of sin, cos, exp, log.
double sin_deriv(double x, int n);
double cos_deriv(double x, int n);

}  // namespace psido
