// SPDX-License-Identifier: Apache-2.0
#include "eepn/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eepn {

ComplexSignal::ComplexSignal(CVec samples, double sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (!(sample_rate_ > 0.0)) throw std::invalid_argument("ComplexSignal: sample_rate must be > 0");
  if (samples_.empty()) throw std::invalid_argument("ComplexSignal: empty sample sequence");
}

// --- 16-QAM -----------------------------------------------------------------

namespace {

constexpr std::array<double, 4> kGrayLevel = {-3.0, -1.0, 3.0, 1.0};  // indexed by 2-bit code

std::array<cplx, 16> build_qam16() {
  std::array<cplx, 16> pts{};
  const double s = 1.0 / std::sqrt(10.0);
  for (int i = 0; i < 16; ++i) pts[static_cast<std::size_t>(i)] = {kGrayLevel[(i >> 2) & 3] * s, kGrayLevel[i & 3] * s};
  return pts;
}

int level_code(double v) {
  // Inverse of kGrayLevel on the nearest of {-3,-1,1,3}.
  if (v < -2.0) return 0;
  if (v < 0.0) return 1;
  if (v < 2.0) return 3;
  return 2;
}

}  // namespace

const std::array<cplx, 16>& qam16_points() {
  static const std::array<cplx, 16> pts = build_qam16();
  return pts;
}

SymbolFrame map_qam16(std::span<const int> indices, double symbol_rate) {
  const auto& pts = qam16_points();
  SymbolFrame frame;
  frame.symbol_rate = symbol_rate;
  frame.symbols.reserve(indices.size());
  for (int idx : indices) {
    if (idx < 0 || idx > 15) throw std::invalid_argument("map_qam16: index out of range 0..15: " + std::to_string(idx));
    frame.symbols.push_back(pts[static_cast<std::size_t>(idx)]);
  }
  return frame;
}

int qam16_nearest(cplx sample) {
  const double s = std::sqrt(10.0);
  return (level_code(sample.real() * s) << 2) | level_code(sample.imag() * s);
}

// --- pulse shaping ----------------------------------------------------------

std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps) {
  if (rolloff < 0.0 || rolloff > 1.0) throw std::invalid_argument("rrc_taps: rolloff outside [0, 1]");
  if (span_symbols < 2) throw std::invalid_argument("rrc_taps: span_symbols must be >= 2");
  if (sps < 2) throw std::invalid_argument("rrc_taps: samples_per_symbol must be >= 2");

  using std::numbers::pi;
  const int len = span_symbols * sps + 1;
  const int mid = len / 2;
  const double a = rolloff;
  std::vector<double> h(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) {
    const double t = static_cast<double>(i - mid) / sps;
    double v;
    if (i == mid) {
      v = 1.0 - a + 4.0 * a / pi;
    } else if (a > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * a)) < 1e-12) {
      v = a / std::sqrt(2.0) *
          ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * a)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * a)));
    } else {
      const double x = 4.0 * a * t;
      v = (std::sin(pi * t * (1.0 - a)) + 4.0 * a * t * std::cos(pi * t * (1.0 + a))) / (pi * t * (1.0 - x * x));
    }
    h[static_cast<std::size_t>(i)] = v;
  }
  // Mirror to make the symmetry exact in floating point.
  for (int i = 0; i < mid; ++i) h[static_cast<std::size_t>(len - 1 - i)] = h[static_cast<std::size_t>(i)];

  double e = 0.0;
  for (double v : h) e += v * v;
  const double g = 1.0 / std::sqrt(e);
  for (double& v : h) v *= g;
  return h;
}

double raised_cosine(double t, double rolloff) {
  using std::numbers::pi;
  const double sinc = (t == 0.0) ? 1.0 : std::sin(pi * t) / (pi * t);
  if (rolloff > 0.0 && std::abs(std::abs(t) - 1.0 / (2.0 * rolloff)) < 1e-12) {
    return pi / 4.0 * std::sin(pi / (2.0 * rolloff)) / (pi / (2.0 * rolloff));
  }
  const double x = 2.0 * rolloff * t;
  return sinc * std::cos(pi * rolloff * t) / (1.0 - x * x);
}

CVec upsample_zeros(std::span<const cplx> x, int factor) {
  if (factor < 1) throw std::invalid_argument("upsample_zeros: factor must be >= 1");
  CVec out(x.size() * static_cast<std::size_t>(factor));
  for (std::size_t i = 0; i < x.size(); ++i) out[i * static_cast<std::size_t>(factor)] = x[i];
  return out;
}

CVec centered_kernel_response(std::span<const double> taps, std::size_t length) {
  if (taps.size() % 2 == 0) throw std::invalid_argument("centered_kernel_response: tap count must be odd");
  if (taps.size() > length) throw std::invalid_argument("centered_kernel_response: kernel longer than transform");
  CVec k(length);
  const auto mid = static_cast<long long>(taps.size() / 2);
  const auto n = static_cast<long long>(length);
  for (std::size_t i = 0; i < taps.size(); ++i) {
    long long pos = (static_cast<long long>(i) - mid) % n;
    if (pos < 0) pos += n;
    k[static_cast<std::size_t>(pos)] += taps[i];
  }
  fft_inplace(k);
  return k;
}

CVec apply_response(std::span<const cplx> x, std::span<const cplx> response) {
  if (x.size() != response.size()) throw std::invalid_argument("apply_response: length mismatch");
  CVec y = fft(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= response[i];
  ifft_inplace(y);
  return y;
}

// --- quality metrics --------------------------------------------------------

namespace {

void check_pair(std::span<const cplx> a, std::span<const cplx> b, const char* who) {
  if (a.empty() || b.empty()) throw std::invalid_argument(std::string(who) + ": zero-length input");
  if (a.size() != b.size()) throw std::invalid_argument(std::string(who) + ": length mismatch");
}

}  // namespace

double mean_power(std::span<const cplx> x) {
  if (x.empty()) return 0.0;
  double p = 0.0;
  for (const auto& v : x) p += std::norm(v);
  return p / static_cast<double>(x.size());
}

double snr_estimate(std::span<const cplx> rx, std::span<const cplx> ref) {
  check_pair(rx, ref, "snr_estimate");
  cplx cross{0.0, 0.0};
  double pref = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    cross += rx[i] * std::conj(ref[i]);
    pref += std::norm(ref[i]);
  }
  if (!(pref > 0.0)) throw std::invalid_argument("snr_estimate: reference has zero power");
  const cplx g = cross / pref;
  double perr = 0.0;
  double prx = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    perr += std::norm(rx[i] - g * ref[i]);
    prx += std::norm(rx[i]);
  }
  const double psig = std::norm(g) * pref;
  // Rounding floor of the fit itself, which grows with the length of the
  // sums; anything below is an exact match.
  const double floor = std::pow(16.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(rx.size()), 2);
  if (perr <= std::max(1e-26, floor) * std::max(prx, psig) || psig == 0.0) {
    return psig == 0.0 ? -kSaturatedSnrDb : kSaturatedSnrDb;
  }
  return std::min(kSaturatedSnrDb, 10.0 * std::log10(psig / perr));
}

double snr_estimate(const SymbolFrame& rx, const SymbolFrame& ref) { return snr_estimate(rx.symbols, ref.symbols); }

double nmse_db(std::span<const cplx> a, std::span<const cplx> b) {
  check_pair(a, b, "nmse_db");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  if (!(den > 0.0)) throw std::invalid_argument("nmse_db: reference has zero power");
  if (num == 0.0) return -kSaturatedSnrDb;
  return std::max(-kSaturatedSnrDb, 10.0 * std::log10(num / den));
}

double evm(std::span<const cplx> rx, std::span<const cplx> ref) {
  check_pair(rx, ref, "evm");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    num += std::norm(rx[i] - ref[i]);
    den += std::norm(ref[i]);
  }
  if (!(den > 0.0)) throw std::invalid_argument("evm: reference has zero power");
  return std::sqrt(num / den);
}

Metric measure(std::span<const cplx> rx, std::span<const cplx> ref) {
  return {snr_estimate(rx, ref), evm(rx, ref), nmse_db(rx, ref)};
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least two samples");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace eepn
