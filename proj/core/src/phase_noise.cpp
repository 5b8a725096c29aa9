// SPDX-License-Identifier: Apache-2.0
#include "eepn/phase_noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "eepn/fft.hpp"
#include "eepn/random.hpp"

namespace eepn {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kResyncInterval = 1024;
}  // namespace

double wiener_increment_variance(double linewidth, double f_sim) {
  return 2.0 * std::numbers::pi * linewidth / f_sim;
}

double PhaseTrace::sigma2() const { return wiener_increment_variance(linewidth, f_sim); }

PhaseTrace gen_wiener(std::size_t length, double linewidth, double f_sim, std::uint64_t seed, double phi0) {
  if (length < 1) throw std::invalid_argument("gen_wiener: length must be >= 1");
  if (linewidth < 0.0) throw std::invalid_argument("gen_wiener: linewidth must be >= 0");
  if (!(f_sim > 0.0)) throw std::invalid_argument("gen_wiener: f_sim must be > 0");

  PhaseTrace t;
  t.f_sim = f_sim;
  t.linewidth = linewidth;
  t.seed = seed;
  t.phi0 = phi0;
  t.phi.assign(length, phi0);
  if (linewidth == 0.0) return t;

  Rng rng(seed);
  const double sd = std::sqrt(wiener_increment_variance(linewidth, f_sim));
  double acc = phi0;
  for (std::size_t k = 1; k < length; ++k) {
    acc += sd * rng.normal();
    t.phi[k] = acc;
  }
  return t;
}

RegressionTrace sliding_regression(std::span<const double> phi, int N, int samples_per_symbol) {
  if (N < 1) throw std::invalid_argument("sliding_regression: N must be >= 1");
  const auto len = phi.size();
  const auto w = 2 * static_cast<std::size_t>(N) + 1;
  if (len < w) {
    throw std::invalid_argument("sliding_regression: window 2N+1 = " + std::to_string(w) +
                                " exceeds trace length " + std::to_string(len));
  }

  RegressionTrace r;
  r.N = N;
  r.N_S = samples_per_symbol > 0 ? N / samples_per_symbol : 0;
  r.a0.assign(len, kNaN);
  r.a1.assign(len, kNaN);

  const double n = N;
  const double inv_w = 1.0 / static_cast<double>(w);
  const double inv_sii = 3.0 / (n * (n + 1.0) * (2.0 * n + 1.0));

  double s0 = 0.0;
  double s1 = 0.0;
  auto rebuild = [&](std::size_t k) {
    s0 = 0.0;
    s1 = 0.0;
    for (int i = -N; i <= N; ++i) {
      const double v = phi[k + static_cast<std::size_t>(i + N) - static_cast<std::size_t>(N)];
      s0 += v;
      s1 += i * v;
    }
  };

  const auto first = static_cast<std::size_t>(N);
  const auto last = len - static_cast<std::size_t>(N);  // exclusive
  rebuild(first);
  int since = 0;
  for (std::size_t k = first; k < last; ++k) {
    if (k != first) {
      if (++since == kResyncInterval) {
        rebuild(k);
        since = 0;
      } else {
        const double out = phi[k - 1 - static_cast<std::size_t>(N)];
        const double in = phi[k + static_cast<std::size_t>(N)];
        s0 += in - out;
        s1 += n * out + (n + 1.0) * in - s0;
      }
    }
    r.a0[k] = s0 * inv_w;
    r.a1[k] = s1 * inv_sii;
  }
  return r;
}

RegressionTrace sliding_regression(const PhaseTrace& trace, int N, int samples_per_symbol) {
  return sliding_regression(std::span<const double>(trace.phi), N, samples_per_symbol);
}

std::vector<double> residual_center(std::span<const double> phi, const RegressionTrace& reg) {
  if (phi.size() != reg.size()) throw std::invalid_argument("residual_center: trace/regression length mismatch");
  std::vector<double> out(phi.size(), kNaN);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (reg.valid(k)) out[k] = phi[k] - reg.a0[k];
  }
  return out;
}

std::vector<double> residual_center(const PhaseTrace& trace, const RegressionTrace& reg) {
  return residual_center(std::span<const double>(trace.phi), reg);
}

ResidualVariance residual_variance(int N, double linewidth, double f_sim) {
  if (N < 1) throw std::invalid_argument("residual_variance: N must be >= 1");
  const double s2 = wiener_increment_variance(linewidth, f_sim);
  const double n = N;
  const double w = 2.0 * n + 1.0;
  ResidualVariance v;
  v.closed_form = 2.0 * s2 * (2.0 / 3.0 * n * n * n + n * n + n / 3.0) / (w * w);
  v.bruteforce = s2 * n * (n + 1.0) / (3.0 * w);
  return v;
}

double residual_acf_unit(int N, long long lag) {
  if (N < 1) throw std::invalid_argument("residual_acf: N must be >= 1");
  const double n = N;
  const double l = static_cast<double>(lag < 0 ? -lag : lag);
  const double w = 2.0 * n + 1.0;
  if (l > 2.0 * n) return 0.0;

  // E[phi_k phi_{k+l}] minus the two point/mean cross terms plus the
  // mean/mean term, each with its k-dependence already cancelled.
  const double point = std::max(0.0, n + 1.0 - l);
  const double cross_a = l <= n ? -(1.5 * n * n + 2.5 * n + 1.0 - 0.5 * l * l - n * l - 0.5 * l) / w : 0.0;
  const double cross_b = l < n ? -(1.5 * n * n + 2.5 * n + n * l + 1.0 + 0.5 * l - 0.5 * l * l) / w
                               : -(2.0 * n * n + 3.0 * n + 1.0) / w;
  const double means = (8.0 / 3.0 * n * n * n + 2.0 * n * n * l + 2.0 * n * l - n * l * l - 0.5 * l * l +
                        6.0 * n * n + 13.0 / 3.0 * n + 1.0 + l * l * l / 6.0 + l / 3.0) /
                       (w * w);
  return point + cross_a + cross_b + means;
}

double residual_acf_printed_unit(int N, long long lag) {
  if (N < 1) throw std::invalid_argument("residual_acf_printed: N must be >= 1");
  const double n = N;
  const double l = static_cast<double>(lag < 0 ? -lag : lag);
  const double w = 2.0 * n + 1.0;
  if (l > 2.0 * n) return 0.0;
  double poly;
  if (l < n) {
    poly = l * l * l / 6.0 + l * l * (n + 0.5) + l * (2.0 * n * n + 4.0 * n + 4.0 / 3.0) - 10.0 / 3.0 * n * n * n -
           7.0 * n * n - 14.0 / 3.0 * n - 1.0;
  } else {
    poly = l * l * l / 6.0 - l * l * (n + 0.5) + l * (2.0 * n * n + 2.0 * n + 2.0 / 3.0) - 4.0 / 3.0 * n * n * n -
           2.0 * n * n - 2.0 / 3.0 * n;
  }
  return std::max(0.0, n + 1.0 - l) + poly / (w * w);
}

double residual_acf_printed(int N, double linewidth, double f_sim, long long l) {
  return wiener_increment_variance(linewidth, f_sim) * residual_acf_printed_unit(N, l);
}

ResidualStats residual_acf(int N, double linewidth, double f_sim, long long lag_min, long long lag_max) {
  if (lag_max < lag_min) throw std::invalid_argument("residual_acf: empty lag range");
  ResidualStats s;
  s.sigma2_inc = wiener_increment_variance(linewidth, f_sim);
  s.f_sim = f_sim;
  s.N = N;
  for (long long l = lag_min; l <= lag_max; ++l) {
    s.lags.push_back(l);
    s.acf.push_back(s.sigma2_inc * residual_acf_unit(N, l));
  }
  return s;
}

ResidualStats residual_acf(int N, double linewidth, double f_sim) {
  return residual_acf(N, linewidth, f_sim, -2LL * N, 2LL * N);
}

ResidualStats residual_psd(ResidualStats stats, std::size_t fft_len) {
  const long long support = 2LL * stats.N;
  if (fft_len < static_cast<std::size_t>(2 * support + 1)) {
    throw std::invalid_argument("residual_psd: fft_len smaller than ACF support 4N+1");
  }
  CVec buf(fft_len);
  long long covered = 0;
  for (std::size_t i = 0; i < stats.lags.size(); ++i) {
    const long long l = stats.lags[i];
    if (l < -support || l > support) continue;
    ++covered;
    const long long pos = l >= 0 ? l : static_cast<long long>(fft_len) + l;
    buf[static_cast<std::size_t>(pos)] += stats.acf[i];
  }
  if (covered != 2 * support + 1) throw std::invalid_argument("residual_psd: ACF must cover lags [-2N, 2N]");
  fft_inplace(buf);
  stats.freq = fft_frequencies(fft_len, stats.f_sim);
  stats.psd.resize(fft_len);
  for (std::size_t i = 0; i < fft_len; ++i) stats.psd[i] = std::abs(buf[i]) / stats.f_sim;
  return stats;
}

std::vector<double> autocorrelation(std::span<const double> x, long long max_lag) {
  if (max_lag < 0) throw std::invalid_argument("autocorrelation: max_lag must be >= 0");
  const auto m = static_cast<long long>(x.size());
  if (m <= max_lag) throw std::invalid_argument("autocorrelation: sequence shorter than max_lag + 1");
  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1);
  for (long long l = 0; l <= max_lag; ++l) {
    double acc = 0.0;
    const double* a = x.data();
    const double* b = x.data() + l;
    const long long cnt = m - l;
    for (long long k = 0; k < cnt; ++k) acc += a[k] * b[k];
    r[static_cast<std::size_t>(l)] = acc / static_cast<double>(cnt);
  }
  return r;
}

std::vector<double> residual_acf_montecarlo(int N, double linewidth, double f_sim, std::size_t num_samples,
                                            std::uint64_t seed, long long max_lag) {
  const std::size_t length = num_samples + 2 * static_cast<std::size_t>(N);
  const PhaseTrace tr = gen_wiener(length, linewidth, f_sim, seed);
  const RegressionTrace reg = sliding_regression(tr, N);
  const std::vector<double> res = residual_center(tr, reg);
  const std::span<const double> valid(res.data() + N, num_samples);
  return autocorrelation(valid, max_lag);
}

std::vector<double> welch_psd(std::span<const double> x, double sample_rate, std::size_t segment) {
  if (segment < 2 || x.size() < segment) throw std::invalid_argument("welch_psd: segment longer than input");
  std::vector<double> win(segment);
  double wsum2 = 0.0;
  for (std::size_t i = 0; i < segment; ++i) {
    // Periodic Hann so that 50% overlap sums to a constant.
    win[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(segment));
    wsum2 += win[i] * win[i];
  }
  const std::size_t hop = segment / 2;
  std::vector<double> acc(segment, 0.0);
  std::size_t count = 0;
  CVec buf(segment);
  for (std::size_t start = 0; start + segment <= x.size(); start += hop) {
    for (std::size_t i = 0; i < segment; ++i) buf[i] = x[start + i] * win[i];
    fft_inplace(buf);
    for (std::size_t i = 0; i < segment; ++i) acc[i] += std::norm(buf[i]);
    ++count;
  }
  const double scale = 1.0 / (static_cast<double>(count) * sample_rate * wsum2);
  for (double& v : acc) v *= scale;
  return acc;
}

}  // namespace eepn
