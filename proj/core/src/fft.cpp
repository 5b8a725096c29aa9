// SPDX-License-Identifier: Apache-2.0
#include "eepn/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace eepn {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan with the
// new-array interface is. Plans are created once per (length, sign) and kept
// for the life of the process.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (plan == nullptr) throw std::runtime_error("fftw plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(CVec& x, int sign) {
  if (x.empty()) throw std::invalid_argument("fft: empty input");
  const int n = static_cast<int>(x.size());
  auto* data = reinterpret_cast<fftw_complex*>(x.data());
  fftw_execute_dft(cache().get(n, sign), data, data);
}

}  // namespace

void fft_inplace(CVec& x) { execute(x, FFTW_FORWARD); }

void ifft_inplace(CVec& x) {
  execute(x, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(x.size());
  for (auto& v : x) v *= scale;
}

CVec fft(std::span<const cplx> x) {
  CVec out(x.begin(), x.end());
  fft_inplace(out);
  return out;
}

CVec ifft(std::span<const cplx> spectrum) {
  CVec out(spectrum.begin(), spectrum.end());
  ifft_inplace(out);
  return out;
}

std::vector<double> fft_frequencies(std::size_t length, double sample_rate) {
  std::vector<double> f(length);
  const auto n = static_cast<long long>(length);
  const double df = sample_rate / static_cast<double>(length);
  for (long long k = 0; k < n; ++k) {
    const long long s = (k <= (n - 1) / 2) ? k : k - n;
    f[static_cast<std::size_t>(k)] = static_cast<double>(s) * df;
  }
  return f;
}

}  // namespace eepn
