// SPDX-License-Identifier: Apache-2.0
#include "eepn/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace eepn {

using std::numbers::pi;

double gardner_s_curve(double tau, double rolloff) {
  constexpr int kTerms = 400;
  double s = 0.0;
  for (int n = -kTerms; n <= kTerms; ++n) {
    const double late = raised_cosine(tau + n, rolloff);
    const double early = raised_cosine(tau + n - 1, rolloff);
    const double mid = raised_cosine(tau + n - 0.5, rolloff);
    s += (late - early) * mid;
  }
  return s;
}

std::vector<double> gardner_ted(std::span<const cplx> z) {
  const std::size_t k_count = z.size() / 2;
  std::vector<double> e(k_count, 0.0);
  for (std::size_t k = 1; k < k_count; ++k) {
    e[k] = std::real((z[2 * k] - z[2 * k - 2]) * std::conj(z[2 * k - 1]));
  }
  return e;
}

namespace {

// Monotonic branch of the S-curve around zero, tabulated once per rolloff.
struct SCurveTable {
  std::vector<double> tau;
  std::vector<double> value;

  double invert(double e) const {
    if (e <= value.front()) return tau.front();
    if (e >= value.back()) return tau.back();
    const auto it = std::upper_bound(value.begin(), value.end(), e);
    const auto i = static_cast<std::size_t>(it - value.begin());
    const double g = (e - value[i - 1]) / (value[i] - value[i - 1]);
    return tau[i - 1] + g * (tau[i] - tau[i - 1]);
  }
};

SCurveTable build_table(double rolloff) {
  constexpr int kPoints = 1000;  // over [0, 0.5]
  std::vector<double> t;
  std::vector<double> v;
  for (int i = 0; i <= kPoints; ++i) {
    const double tau = 0.5 * i / kPoints;
    const double s = gardner_s_curve(tau, rolloff);
    if (!v.empty() && s <= v.back()) break;  // past the peak
    t.push_back(tau);
    v.push_back(s);
  }
  SCurveTable table;
  for (std::size_t i = t.size(); i-- > 1;) {
    table.tau.push_back(-t[i]);
    table.value.push_back(-v[i]);
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    table.tau.push_back(t[i]);
    table.value.push_back(v[i]);
  }
  return table;
}

const SCurveTable& s_curve_table(double rolloff) {
  static std::mutex mutex;
  static std::map<double, SCurveTable> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(rolloff);
  if (it == cache.end()) it = cache.emplace(rolloff, build_table(rolloff)).first;
  return it->second;
}

}  // namespace

cplx cubic_interpolate(std::span<const cplx> z, double t) {
  const auto n = static_cast<long long>(z.size());
  const double fl = std::floor(t);
  const auto i = static_cast<long long>(fl);
  const double mu = t - fl;
  auto at = [&](long long k) { return z[static_cast<std::size_t>(std::clamp(k, 0LL, n - 1))]; };
  const double wm1 = -mu * (mu - 1.0) * (mu - 2.0) / 6.0;
  const double w0 = (mu + 1.0) * (mu - 1.0) * (mu - 2.0) / 2.0;
  const double w1 = -(mu + 1.0) * mu * (mu - 2.0) / 2.0;
  const double w2 = (mu + 1.0) * mu * (mu - 1.0) / 6.0;
  return wm1 * at(i - 1) + w0 * at(i) + w1 * at(i + 1) + w2 * at(i + 2);
}

TimingRecoveryResult gardner_tr(std::span<const cplx> z, int samples_per_symbol, int averaging_len, double rolloff) {
  if (samples_per_symbol != 2) throw std::invalid_argument("gardner_tr: input must have exactly 2 samples/symbol");
  if (averaging_len < 1) throw std::invalid_argument("gardner_tr: averaging_len must be >= 1");
  if (z.size() < 4) throw std::invalid_argument("gardner_tr: input too short");

  const std::vector<double> e = gardner_ted(z);
  const std::size_t k_count = e.size();
  // e_0 has no predecessor; average over the defined detector outputs only.
  std::vector<double> smooth = centered_moving_average<double>(std::span<const double>(e).subspan(1), averaging_len);
  smooth.insert(smooth.begin(), k_count > 1 ? smooth.front() : 0.0);

  const SCurveTable& table = s_curve_table(rolloff);
  TimingRecoveryResult r;
  r.timing.averaging_len = averaging_len;
  r.timing.error.resize(k_count);
  r.timing.center.resize(k_count);
  r.retimed.symbols.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double tau = table.invert(smooth[k]);
    r.timing.error[k] = tau;
    r.timing.center[k] = static_cast<double>(k);
    r.retimed.symbols[k] = cubic_interpolate(z, 2.0 * static_cast<double>(k) - 2.0 * tau);
  }
  return r;
}

TimingRecoveryResult gardner_tr(const ComplexSignal& waveform, double symbol_rate, int averaging_len, double rolloff) {
  const double ratio = waveform.sample_rate() / symbol_rate;
  if (std::abs(ratio - 2.0) > 1e-9) throw std::invalid_argument("gardner_tr: input must have exactly 2 samples/symbol");
  auto r = gardner_tr(waveform.samples(), 2, averaging_len, rolloff);
  r.retimed.symbol_rate = symbol_rate;
  return r;
}

TimingEstimate genie_timing(std::span<const cplx> tx, std::span<const cplx> rx, int upsample, int window, int hop) {
  if (tx.size() != rx.size()) throw std::invalid_argument("genie_timing: frames must be aligned and of equal length");
  if (upsample < 1) throw std::invalid_argument("genie_timing: upsample must be >= 1");
  if (window < 64) throw std::invalid_argument("genie_timing: window must be >= 64 symbols");
  if (hop < 1) throw std::invalid_argument("genie_timing: hop must be >= 1");
  if (tx.size() < static_cast<std::size_t>(window)) throw std::invalid_argument("genie_timing: frame shorter than window");

  constexpr int kLags = 32;
  constexpr int kTaps = 2 * kLags + 1;
  const auto n = static_cast<long long>(tx.size());
  const int grid = upsample + 1;  // offsets -1/2 .. +1/2 symbol
  const double step = 1.0 / upsample;

  auto sinc = [](double x) { return x == 0.0 ? 1.0 : std::sin(pi * x) / (pi * x); };
  auto dsinc = [&](double x) { return x == 0.0 ? 0.0 : (std::cos(pi * x) - sinc(x)) / x; };
  auto at = [&](std::span<const cplx> v, long long i) { return i >= 0 && i < n ? v[static_cast<std::size_t>(i)] : cplx{}; };

  // The reference at offset s is tx_s[k] = Σ_d tx[k-d] sinc(d+s), the
  // band-limited continuation of tx. The fit maximizes the least-squares
  // agreement |<rx, tx_s>|² / ||tx_s||², which peaks exactly at the truth for
  // a delayed copy and ignores any complex gain on rx.
  std::vector<double> h(kTaps), dh(kTaps);
  auto taps = [&](double s, bool deriv) {
    for (int d = -kLags; d <= kLags; ++d) {
      h[static_cast<std::size_t>(d + kLags)] = sinc(d + s);
      if (deriv) dh[static_cast<std::size_t>(d + kLags)] = dsinc(d + s);
    }
  };

  TimingEstimate est;
  est.averaging_len = window;
  std::vector<cplx> r(kTaps);
  std::vector<double> gram(static_cast<std::size_t>(kTaps * kTaps));  // Re Σ_k tx[k-d_a] conj(tx[k-d_b])
  auto G = [&](int a, int b) -> double& { return gram[static_cast<std::size_t>(a * kTaps + b)]; };
  std::vector<double> metric(static_cast<std::size_t>(grid));

  for (long long s0 = 0; s0 + window <= n; s0 += hop) {
    bool varied = false;
    for (long long k = s0 + 1; k < s0 + window && !varied; ++k) varied = tx[static_cast<std::size_t>(k)] != tx[static_cast<std::size_t>(s0)];
    if (!varied) throw std::invalid_argument("genie_timing: degenerate window (all symbols equal)");
    const long long s1 = s0 + window;

    for (int d = -kLags; d <= kLags; ++d) {
      cplx acc{0.0, 0.0};
      for (long long k = s0; k < s1; ++k) acc += rx[static_cast<std::size_t>(k)] * std::conj(at(tx, k - d));
      r[static_cast<std::size_t>(d + kLags)] = acc;
    }
    // Last column directly, the rest by sliding one symbol along the diagonal.
    for (int a = 0; a < kTaps; ++a) {
      double acc = 0.0;
      for (long long k = s0; k < s1; ++k) acc += (at(tx, k - (a - kLags)) * std::conj(at(tx, k - kLags))).real();
      G(a, kTaps - 1) = acc;
    }
    for (int a = kTaps - 2; a >= 0; --a) {
      for (int b = kTaps - 2; b >= a; --b) {
        const long long da = a - kLags, lag = a - b;
        const long long add = s1 - 1 - da, drop = s0 - da - 1;
        G(a, b) = G(a + 1, b + 1) + (at(tx, add) * std::conj(at(tx, add + lag))).real() -
                  (at(tx, drop) * std::conj(at(tx, drop + lag))).real();
      }
    }

    // numerator, energy and the derivative of numerator·E - |n|²E' terms
    auto evaluate = [&](double s, bool deriv, double& m, double& slope) {
      taps(s, deriv);
      cplx num{0.0, 0.0}, dnum{0.0, 0.0};
      double e = 0.0, de = 0.0;
      for (int a = 0; a < kTaps; ++a) {
        const auto ia = static_cast<std::size_t>(a);
        num += h[ia] * r[ia];
        double row = 0.5 * h[ia] * G(a, a);
        for (int b = a + 1; b < kTaps; ++b) row += h[static_cast<std::size_t>(b)] * G(a, b);
        e += 2.0 * h[ia] * row;
        if (deriv) {
          dnum += dh[ia] * r[ia];
          double full = 0.0;
          for (int b = 0; b < kTaps; ++b) full += h[static_cast<std::size_t>(b)] * (b >= a ? G(a, b) : G(b, a));
          de += 2.0 * dh[ia] * full;
        }
      }
      m = std::norm(num) / e;
      slope = deriv ? 2.0 * (dnum * std::conj(num)).real() * e - std::norm(num) * de : 0.0;
    };

    int best = 0;
    double dummy = 0.0;
    for (int g = 0; g < grid; ++g) {
      evaluate(-0.5 + g * step, false, metric[static_cast<std::size_t>(g)], dummy);
      if (metric[static_cast<std::size_t>(g)] > metric[static_cast<std::size_t>(best)]) best = g;
    }
    double refined = -0.5 + best * step;
    if (best > 0 && best < grid - 1) {
      // Parabolic estimate, then the exact stationary point inside the bracket.
      const double ym = metric[static_cast<std::size_t>(best - 1)];
      const double y0 = metric[static_cast<std::size_t>(best)];
      const double yp = metric[static_cast<std::size_t>(best + 1)];
      const double den = ym - 2.0 * y0 + yp;
      if (den < 0.0) refined += 0.5 * (ym - yp) / den * step;
      double lo = -0.5 + (best - 1) * step, hi = -0.5 + (best + 1) * step;
      double f_lo = 0.0, f_hi = 0.0, m = 0.0;
      evaluate(lo, true, m, f_lo);
      evaluate(hi, true, m, f_hi);
      if (f_lo > 0.0 && f_hi < 0.0) {
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          double f = 0.0;
          evaluate(mid, true, m, f);
          if (f == 0.0) {
            lo = hi = mid;
            break;
          }
          (f > 0.0 ? lo : hi) = mid;
        }
        refined = 0.5 * (lo + hi);
      }
    }
    est.error.push_back(refined);
    est.center.push_back(static_cast<double>(s0) + 0.5 * (window - 1));
  }
  return est;
}

CprResult idr_cpr(std::span<const cplx> rx, std::span<const cplx> tx, int averaging_len) {
  if (rx.size() != tx.size()) throw std::invalid_argument("idr_cpr: length mismatch");
  if (averaging_len < 1 || averaging_len % 2 == 0) throw std::invalid_argument("idr_cpr: averaging_len must be odd and >= 1");
  const std::size_t n = rx.size();
  CVec p(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double m = std::norm(tx[k]);
    if (m == 0.0) throw std::invalid_argument("idr_cpr: zero-magnitude reference symbol");
    p[k] = rx[k] * std::conj(tx[k]) / m;
  }
  const CVec avg = centered_moving_average<cplx>(p, averaging_len);

  CprResult out;
  out.est.averaging_len = averaging_len;
  out.est.theta.resize(n);
  out.derotated.symbols.resize(n);
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double th = std::arg(avg[k]);
    if (k > 0) th = prev + std::remainder(th - prev, 2.0 * pi);
    out.est.theta[k] = th;
    prev = th;
    out.derotated.symbols[k] = rx[k] * std::polar(1.0, -th);
  }
  return out;
}

}  // namespace eepn
