#include "psido/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "psido/errors.hpp"

namespace psido {

namespace {

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans;
};

PlanCache& cache() {
  static PlanCache* c = new PlanCache();
  return *c;
}

void run(std::vector<std::complex<double>>& data, const std::vector<int>& shape, int sign) {
  long total = 1;
  for (int s : shape) total *= s;
  require(long(data.size()) == total, ErrorKind::InvalidInput, "fft data does not match shape");
  if (total == 0) return;
  PlanCache& c = cache();
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(c.mu);
    auto key = std::make_pair(shape, sign);
    auto it = c.plans.find(key);
    if (it == c.plans.end()) {
      std::vector<std::complex<double>> tmp(total);
      auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
      plan = fftw_plan_dft(int(shape.size()), shape.data(), p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
      require(plan != nullptr, ErrorKind::Numeric, "fftw plan creation failed");
      c.plans.emplace(key, plan);
    } else {
      plan = it->second;
    }
  }
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data, const std::vector<int>& shape) {
  run(data, shape, FFTW_FORWARD);
}

void fft_backward(std::vector<std::complex<double>>& data, const std::vector<int>& shape) {
  run(data, shape, FFTW_BACKWARD);
}

bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace psido
