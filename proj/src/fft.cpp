#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace hfrac::detail {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

std::mutex plan_mutex;
std::map<int, PlanPair>& plan_cache() {
  static std::map<int, PlanPair> cache;
  return cache;
}

PlanPair& get_plans(int n) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // UNALIGNED so the plans execute on arbitrary buffers.
  fftw_complex* tmp = fftw_alloc_complex(static_cast<std::size_t>(n));
  PlanPair p;
  p.fwd = fftw_plan_dft_1d(n, tmp, tmp, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.inv = fftw_plan_dft_1d(n, tmp, tmp, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(tmp);
  if (!p.fwd || !p.inv) throw std::runtime_error("fft: plan creation failed");
  return cache.emplace(n, p).first->second;
}

}  // namespace

void fft_inplace(std::complex<double>* data, int n, int sign) {
  if (n < 1) throw std::invalid_argument("fft: n must be positive");
  auto& plans = get_plans(n);
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  if (sign < 0) {
    fftw_execute_dft(plans.fwd, raw, raw);
  } else {
    fftw_execute_dft(plans.inv, raw, raw);
    const double scale = 1.0 / n;
    for (int i = 0; i < n; ++i) data[i] *= scale;
  }
}

double bin_frequency(int k, int n, double L) {
  const int signed_k = (k <= n / 2) ? k : k - n;
  return signed_k / L;
}

}  // namespace hfrac::detail
