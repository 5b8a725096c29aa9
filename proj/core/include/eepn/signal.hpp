// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "eepn/fft.hpp"

namespace eepn {

/// Complex baseband waveform with an explicit sample rate (Hz).
class ComplexSignal {
 public:
  ComplexSignal(CVec samples, double sample_rate);

  const CVec& samples() const { return samples_; }
  CVec& samples() { return samples_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t size() const { return samples_.size(); }
  double duration() const { return static_cast<double>(samples_.size()) / sample_rate_; }

 private:
  CVec samples_;
  double sample_rate_;
};

enum class Constellation { QAM16 };

struct SymbolFrame {
  CVec symbols;
  double symbol_rate = 100e9;
  Constellation constellation = Constellation::QAM16;

  std::size_t size() const { return symbols.size(); }
};

/// Data-aided quality figures of a received frame against its reference.
struct Metric {
  double snr_db = 0.0;
  double evm = 0.0;
  double nmse_db = 0.0;
};

/// SNR reported when the error vector vanishes.
inline constexpr double kSaturatedSnrDb = 300.0;

// --- 16-QAM -----------------------------------------------------------------

/// Gray-mapped square 16-QAM with unit average power.
///
/// Index bits b3 b2 select the in-phase level and b1 b0 the quadrature level,
/// each through the Gray sequence 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3,
/// scaled by 1/sqrt(10). Index 0 is therefore (-3 - 3j)/sqrt(10).
const std::array<cplx, 16>& qam16_points();
SymbolFrame map_qam16(std::span<const int> indices, double symbol_rate = 100e9);
int qam16_nearest(cplx sample);

// --- pulse shaping ----------------------------------------------------------

/// Root-raised-cosine taps, length span_symbols * sps + 1, centered,
/// normalized to unit energy.
std::vector<double> rrc_taps(double rolloff, int span_symbols, int samples_per_symbol);

/// Raised-cosine pulse at time t (in symbol periods), p(0) = 1.
double raised_cosine(double t_symbols, double rolloff);

CVec upsample_zeros(std::span<const cplx> x, int factor);

/// DFT of a centered (zero-phase) tap vector laid out circularly on `length` bins.
CVec centered_kernel_response(std::span<const double> taps, std::size_t length);

/// Circular filtering: ifft(fft(x) * response).
CVec apply_response(std::span<const cplx> x, std::span<const cplx> response);

// --- quality metrics --------------------------------------------------------

/// SNR in dB after removing one complex gain: rx is fitted as g * ref in the
/// least-squares sense and the residual rx - g * ref is the error.
/// Returns kSaturatedSnrDb for an error-free frame.
double snr_estimate(std::span<const cplx> received, std::span<const cplx> reference);
double snr_estimate(const SymbolFrame& received, const SymbolFrame& reference);

/// 10 log10(mean|a - b|^2 / mean|b|^2); -kSaturatedSnrDb when a == b.
double nmse_db(std::span<const cplx> a, std::span<const cplx> b);

/// RMS error over RMS reference, no gain fit.
double evm(std::span<const cplx> received, std::span<const cplx> reference);

Metric measure(std::span<const cplx> received, std::span<const cplx> reference);

double pearson(std::span<const double> x, std::span<const double> y);

double mean_power(std::span<const cplx> x);

}  // namespace eepn
