// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "eepn/signal.hpp"

namespace eepn {

/// Per-symbol timing error in symbol periods. Positive means the input was
/// sampled late: rx_k ≈ g·x(kT + error_k).
struct TimingEstimate {
  std::vector<double> error;
  std::vector<double> center;  // symbol index each entry refers to
  int averaging_len = 0;
};

struct CprEstimate {
  std::vector<double> theta;  // rad, unwrapped
  int averaging_len = 0;
};

struct TimingRecoveryResult {
  SymbolFrame retimed;
  TimingEstimate timing;
};

struct CprResult {
  SymbolFrame derotated;
  CprEstimate est;
};

/// Expected Gardner detector output versus sampling offset (symbols) for
/// unit-power i.i.d. symbols shaped by a raised-cosine pulse.
double gardner_s_curve(double offset, double rolloff);

/// Raw Gardner detector output per symbol, e_k = Re{(z[2k] - z[2k-2]) conj(z[2k-1])};
/// e_0 is set to 0.
std::vector<double> gardner_ted(std::span<const cplx> z);

/// Feedforward Gardner timing recovery on a 2-samples/symbol waveform (symbol
/// k at index 2k). The detector output is averaged over a centered window of
/// averaging_len symbols, mapped to an offset through the inverted S-curve and
/// removed by cubic Lagrange interpolation.
/// The input is assumed to carry unit average symbol power.
TimingRecoveryResult gardner_tr(std::span<const cplx> z, int samples_per_symbol, int averaging_len, double rolloff);
TimingRecoveryResult gardner_tr(const ComplexSignal& waveform, double symbol_rate, int averaging_len, double rolloff);

/// Cubic Lagrange interpolation of z at real index t (edge samples repeated).
cplx cubic_interpolate(std::span<const cplx> z, double t);

/// Data-aided timing truth: cross-correlate rx against the band-limited
/// continuation of tx on a 1/upsample symbol grid, per window of `window`
/// symbols advanced by `hop`; the argmax (parabolic refined) is the error.
TimingEstimate genie_timing(std::span<const cplx> tx, std::span<const cplx> rx, int upsample = 200, int window = 256,
                            int hop = 32);

/// Ideal data remodulation: θ_k = arg Σ_{|i-k|≤h} rx_i conj(tx_i)/|tx_i|², h = (len-1)/2,
/// truncated at the frame ends; output rx_k e^{-jθ_k}.
CprResult idr_cpr(std::span<const cplx> rx, std::span<const cplx> tx, int averaging_len);

/// Centered moving average with windows truncated at the ends.
template <class T>
std::vector<T> centered_moving_average(std::span<const T> x, int len) {
  const auto n = static_cast<long long>(x.size());
  if (len <= 1) return std::vector<T>(x.begin(), x.end());
  const long long h = (len - 1) / 2;
  std::vector<T> prefix(static_cast<std::size_t>(n) + 1, T{});
  for (long long i = 0; i < n; ++i) prefix[static_cast<std::size_t>(i + 1)] = prefix[static_cast<std::size_t>(i)] + x[static_cast<std::size_t>(i)];
  std::vector<T> out(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const long long lo = std::max(0LL, i - h);
    const long long hi = std::min(n, i + (len - 1 - h) + 1);
    out[static_cast<std::size_t>(i)] =
        (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]) / static_cast<double>(hi - lo);
  }
  return out;
}

}  // namespace eepn
