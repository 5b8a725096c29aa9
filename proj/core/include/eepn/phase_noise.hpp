// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace eepn {

/// One Wiener phase realization sampled at f_sim.
struct PhaseTrace {
  std::vector<double> phi;  // rad
  double f_sim = 1e12;      // Hz
  double linewidth = 0.0;   // Hz
  std::uint64_t seed = 0;
  double phi0 = 0.0;

  std::size_t size() const { return phi.size(); }
  /// Increment variance 2π·Δν/f_sim.
  double sigma2() const;
};

double wiener_increment_variance(double linewidth, double f_sim);

/// phi[0] = phi0, phi[k] = phi[k-1] + N(0, 2πΔν/f_sim).
PhaseTrace gen_wiener(std::size_t length, double linewidth, double f_sim, std::uint64_t seed, double phi0 = 0.0);

/// Per-instant affine fit of a phase trace over 2N+1 samples.
///
/// For instant k, a0[k] is the window mean and a1[k] the least-squares slope
/// (rad/sample) about the window center. The first and last N instants have
/// no full window and hold NaN; use valid() before reading them.
struct RegressionTrace {
  std::vector<double> a0;
  std::vector<double> a1;
  int N = 0;    // half window, samples
  int N_S = 0;  // half window, symbols (0 if unknown)

  std::size_t size() const { return a0.size(); }
  bool valid(std::size_t k) const {
    return k >= static_cast<std::size_t>(N) && k + static_cast<std::size_t>(N) < a0.size();
  }
};

/// Running-sum regression, O(length). The sums are rebuilt from scratch every
/// `resync` steps so rounding drift stays bounded on long traces.
RegressionTrace sliding_regression(std::span<const double> phi, int N, int samples_per_symbol = 0);
RegressionTrace sliding_regression(const PhaseTrace& trace, int N, int samples_per_symbol = 0);

/// n_k = phi_k - a0_k at every valid instant, NaN elsewhere.
std::vector<double> residual_center(std::span<const double> phi, const RegressionTrace& reg);
std::vector<double> residual_center(const PhaseTrace& trace, const RegressionTrace& reg);

struct ResidualVariance {
  double closed_form = 0.0;  // (4πΔν/f_sim)(2N³/3 + N² + N/3)/(2N+1)²
  double bruteforce = 0.0;   // σ²N(N+1)/(3(2N+1)), variance of n_k
};
ResidualVariance residual_variance(int N, double linewidth, double f_sim);

/// Residual autocorrelation, assembled from the four cross-covariance parts
/// of the window-mean decomposition, at unit increment variance. Even in l,
/// zero for |l| > 2N.
double residual_acf_unit(int N, long long l);

/// The closed form as it is usually quoted in combined piecewise form. It does
/// not agree with residual_acf_unit at 0 < |l| < 2N (for N = 1, l = 1 it gives
/// 25/27 instead of -1/9) and is kept only to document that discrepancy.
double residual_acf_printed_unit(int N, long long l);
double residual_acf_printed(int N, double linewidth, double f_sim, long long l);

struct ResidualStats {
  double sigma2_inc = 0.0;
  double f_sim = 1e12;
  int N = 0;
  std::vector<long long> lags;
  std::vector<double> acf;   // rad², aligned with lags
  std::vector<double> freq;  // Hz, FFT order
  std::vector<double> psd;   // rad²/Hz, aligned with freq
};

/// Analytic ACF on lags [lag_min, lag_max].
ResidualStats residual_acf(int N, double linewidth, double f_sim, long long lag_min, long long lag_max);
/// Analytic ACF on its full support [-2N, 2N].
ResidualStats residual_acf(int N, double linewidth, double f_sim);

/// |DFT of the zero-padded ACF| / f_sim, so that the PSD integrates to acf[0]
/// when the transform is nonnegative. Needs the full [-2N, 2N] support.
ResidualStats residual_psd(ResidualStats stats, std::size_t fft_len);

/// Empirical ACF of residual_center over one long realization, unbiased
/// (divides lag l by the number of products). Lags 0..max_lag.
std::vector<double> residual_acf_montecarlo(int N, double linewidth, double f_sim, std::size_t num_samples,
                                            std::uint64_t seed, long long max_lag);

/// Unbiased sample autocorrelation of x at lags 0..max_lag, no mean removal.
std::vector<double> autocorrelation(std::span<const double> x, long long max_lag);

/// Two-sided Welch estimate with a Hann window and 50% overlap, FFT order,
/// density scaling (integrates to the mean square of x).
std::vector<double> welch_psd(std::span<const double> x, double sample_rate, std::size_t segment);

}  // namespace eepn
