#pragma once

#include <complex>
#include <vector>

namespace psido {

// Unnormalized DFT, forward sign -1, over a row-major array of the given shape.
// Plans use FFTW_ESTIMATE so results are deterministic.
void fft_forward(std::vector<std::complex<double>>& data, const std::vector<int>& shape);
void fft_backward(std::vector<std::complex<double>>& data, const std::vector<int>& shape);

// Signed integer frequency index of bin k on an axis of length n.
inline int fft_index(int k, int n) { return k < n / 2 ? k : k - n; }

bool is_pow2(long n);

}  // namespace psido
