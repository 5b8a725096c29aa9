// SPDX-License-Identifier: Apache-2.0
#include "eepn/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "eepn/fft.hpp"
#include "eepn/parallel.hpp"

namespace eepn {

using std::numbers::pi;

WindowParams cd_memory(const LinkConfig& config) {
  WindowParams w;
  w.N_CD = cd_memory_symbols(config);
  w.N_S = half_window_symbols(config);
  w.N = w.N_S * config.samples_per_symbol();
  return w;
}

double dispersion_samples(const LinkConfig& c) { return c.beta2 * c.length * c.f_sim * c.f_sim; }

// --- interpolation ----------------------------------------------------------

namespace {

double bessel_i0(double x) {
  // Power series; converges quickly for the beta values used here.
  double sum = 1.0;
  double term = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

FractionalDelay::FractionalDelay(int taps, int phases, double beta) : taps_(taps), phases_(phases) {
  if (taps < 2 || taps % 2 != 0) throw std::invalid_argument("FractionalDelay: taps must be even and >= 2");
  if (phases < 1) throw std::invalid_argument("FractionalDelay: phases must be >= 1");
  const int half = taps / 2;
  const double i0b = bessel_i0(beta);
  table_.resize(static_cast<std::size_t>(phases + 1) * static_cast<std::size_t>(taps));
  for (int p = 0; p <= phases; ++p) {
    const double frac = static_cast<double>(p) / phases;
    for (int j = 0; j < taps; ++j) {
      // Tap j sits at integer offset (j - half + 1) from floor(t).
      const double u = frac - static_cast<double>(j - half + 1);
      const double s = (u == 0.0) ? 1.0 : std::sin(pi * u) / (pi * u);
      const double r = u / half;
      const double win = (std::abs(r) >= 1.0) ? 0.0 : bessel_i0(beta * std::sqrt(1.0 - r * r)) / i0b;
      table_[static_cast<std::size_t>(p * taps + j)] = s * win;
    }
  }
}

cplx FractionalDelay::operator()(std::span<const cplx> x, double t) const {
  const double fl = std::floor(t);
  const auto i0 = static_cast<long long>(fl);
  const double f = (t - fl) * phases_;
  int p = static_cast<int>(f);
  if (p >= phases_) p = phases_ - 1;
  const double g = f - p;
  const double* r0 = table_.data() + static_cast<std::size_t>(p) * static_cast<std::size_t>(taps_);
  const double* r1 = r0 + taps_;
  const long long start = i0 - taps_ / 2 + 1;
  const auto n = static_cast<long long>(x.size());

  double re = 0.0;
  double im = 0.0;
  if (taps_ == kDefaultTaps && start >= 0 && start + kDefaultTaps <= n) {
    // Fixed trip count so the compiler can unroll and vectorize.
    const double* xs = reinterpret_cast<const double*>(x.data() + start);
    for (int j = 0; j < kDefaultTaps; ++j) {
      const double w = r0[j] + g * (r1[j] - r0[j]);
      re += w * xs[2 * j];
      im += w * xs[2 * j + 1];
    }
  } else if (start >= 0 && start + taps_ <= n) {
    const cplx* xs = x.data() + start;
    for (int j = 0; j < taps_; ++j) {
      const double w = r0[j] + g * (r1[j] - r0[j]);
      re += w * xs[j].real();
      im += w * xs[j].imag();
    }
  } else {
    for (int j = 0; j < taps_; ++j) {
      const long long idx = start + j;
      if (idx < 0 || idx >= n) continue;
      const double w = r0[j] + g * (r1[j] - r0[j]);
      re += w * x[static_cast<std::size_t>(idx)].real();
      im += w * x[static_cast<std::size_t>(idx)].imag();
    }
  }
  return {re, im};
}

double lerp_at(std::span<const double> x, double t) {
  const auto n = static_cast<long long>(x.size());
  if (t <= 0.0) return x.front();
  if (t >= static_cast<double>(n - 1)) return x.back();
  const double fl = std::floor(t);
  const auto i = static_cast<std::size_t>(fl);
  const double g = t - fl;
  return x[i] + g * (x[i + 1] - x[i]);
}

SymbolFrame predict_linearized(std::span<const cplx> x_mf, const RegressionTrace& reg_tx,
                               const RegressionTrace& reg_rx, const LinkConfig& config, std::size_t first_symbol,
                               std::size_t count) {
  if (reg_tx.size() != reg_rx.size() || reg_tx.size() != x_mf.size()) {
    throw std::invalid_argument("predict_linearized: waveform/regression length mismatch");
  }
  if (reg_tx.N != reg_rx.N) throw std::invalid_argument("predict_linearized: regressions use different N");
  const FractionalDelay interp;
  const double D = dispersion_samples(config);
  const auto sps = static_cast<std::size_t>(config.samples_per_symbol());
  SymbolFrame out;
  out.symbol_rate = config.symbol_rate;
  out.symbols.reserve(count);
  for (std::size_t k = first_symbol; k < first_symbol + count; ++k) {
    const std::size_t t = k * sps;
    if (!reg_tx.valid(t) || !reg_rx.valid(t)) continue;  // no fit at the edges
    const double a0 = reg_tx.a0[t], a1 = reg_tx.a1[t];
    const double b0 = reg_rx.a0[t], b1 = reg_rx.a1[t];
    const cplx x = interp(x_mf, static_cast<double>(t) + D * b1);
    out.symbols.push_back(x * std::polar(1.0, a0 + b0 + D * a1 * b1 + 0.5 * D * b1 * b1));
  }
  return out;
}

// --- synthesis --------------------------------------------------------------

CVec synthesize(const EepnComponents& c, unsigned mask) {
  CVec y(c.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    cplx v = c.x_terr[i];
    if (mask & kTermRot) v += c.n_rot[i];
    if (mask & kTermRrn) v += c.n_rrn[i];
    if (mask & kTermXrn) v += c.n_xrn[i];
    y[i] = std::polar(1.0, c.phi0[i]) * v;
  }
  return y;
}

SymbolFrame synthesize_frame(const EepnComponents& c, double symbol_rate, unsigned mask) {
  SymbolFrame f;
  f.symbol_rate = symbol_rate;
  f.symbols = synthesize(c, mask);
  return f;
}

// --- decomposition ----------------------------------------------------------

namespace {

constexpr std::size_t kChunk = 2048;  // fixed so results do not depend on the thread count

struct Setup {
  int N = 0;
  long long L = 0;
  int hop = 0;
  std::size_t count = 0;
  std::size_t t_first = 0;
  double D = 0.0;
  CVec x_mf;
};

Setup prepare(const LinkConfig& config, const LinkInputs& in, const WindowParams& w, const DecomposeOptions& opt) {
  config.validate();
  if (w.N_S < w.N_CD) {
    throw std::invalid_argument("decompose: window too small, N_S = " + std::to_string(w.N_S) +
                                " < N_CD = " + std::to_string(w.N_CD));
  }
  if (w.N < 1) throw std::invalid_argument("decompose: half window N must be >= 1");
  const int sps = config.samples_per_symbol();
  if (opt.outputs_per_symbol < 1 || sps % opt.outputs_per_symbol != 0) {
    throw std::invalid_argument("decompose: outputs_per_symbol must divide the oversampling factor");
  }
  const std::size_t n = in.symbols.size() * static_cast<std::size_t>(sps);
  if (in.tx_phase.size() != n || in.rx_phase.size() != n) {
    throw std::invalid_argument("decompose: phase traces do not match the symbol frame");
  }

  Setup s;
  s.N = w.N;
  s.L = 2LL * w.N + 1;
  s.hop = sps / opt.outputs_per_symbol;
  s.count = in.kept * static_cast<std::size_t>(opt.outputs_per_symbol);
  s.t_first = in.offset * static_cast<std::size_t>(sps);
  s.D = dispersion_samples(config);

  const std::size_t t_last = s.t_first + (s.count - 1) * static_cast<std::size_t>(s.hop);
  if (s.t_first < static_cast<std::size_t>(w.N) || t_last + static_cast<std::size_t>(w.N) >= n) {
    throw std::invalid_argument("decompose: guard too short for the regression window (need " +
                                std::to_string(w.N_S) + " symbols, have " + std::to_string(in.offset) + ")");
  }
  s.x_mf = reference_waveform(config, in.symbols);
  return s;
}

EepnComponents empty_components(const Setup& s, const LinkInputs& in, const DecomposeOptions& opt, std::size_t n) {
  EepnComponents c;
  c.outputs_per_symbol = opt.outputs_per_symbol;
  c.first_symbol = in.offset;
  c.phi0.resize(n);
  c.x_terr.resize(n);
  c.n_rot.resize(n);
  c.n_rrn.resize(n);
  c.n_xrn.resize(n);
  (void)s;
  return c;
}

// Least-squares line over [t-N, t+N], relative to φ(t) so that a flat trace
// gives exactly zero offset and slope.
struct LineFit {
  double ref = 0.0;     // φ(t)
  double offset = 0.0;  // a0 - φ(t)
  double slope = 0.0;
  double a0() const { return ref + offset; }
};

LineFit fit_line(std::span<const double> ph, std::size_t t, int N) {
  const double n = N;
  const double sum_ii = n * (n + 1.0) * (2.0 * n + 1.0) / 3.0;
  LineFit f;
  f.ref = ph[t];
  double s0 = 0.0;
  double s1 = 0.0;
  const double* p = ph.data() + (t - static_cast<std::size_t>(N));
  for (int chi = -N; chi <= N; ++chi, ++p) {
    const double v = *p - f.ref;
    s0 += v;
    s1 += chi * v;
  }
  f.offset = s0 / (2.0 * n + 1.0);
  f.slope = s1 / sum_ii;
  return f;
}

// e^{j(c0 + c1 k + c2 k²)} for k = 0, 1, 2, ... by two complex multiplies per step.
struct QuadPhasor {
  cplx value, step, accel;
  QuadPhasor(double c0, double c1, double c2)
      : value(std::polar(1.0, c0)), step(std::polar(1.0, c1 + c2)), accel(std::polar(1.0, 2.0 * c2)) {}
  void advance() {
    value *= step;
    step *= accel;
  }
};

}  // namespace

EepnComponents decompose(const LinkConfig& config, const LinkInputs& in, const WindowParams& window,
                         const DecomposeOptions& opt) {
  const Setup s = prepare(config, in, window, opt);
  EepnComponents out = empty_components(s, in, opt, s.count);

  const long long L = s.L;
  const int N = s.N;
  const double D = s.D;
  const double delta = 2.0 * pi / static_cast<double>(L);
  const double kappa = phase_kappa(opt.convention);
  const bool printed = opt.convention == PhaseConvention::AsPrinted;

  long long M = (L - 1) / 2;
  if (D != 0.0) M = std::min<long long>(M, static_cast<long long>(N / (std::abs(D) * delta)) + 2);

  // tw[j] = e^{-j2πj/L}
  CVec tw(static_cast<std::size_t>(L));
  for (long long j = 0; j < L; ++j) tw[static_cast<std::size_t>(j)] = std::polar(1.0, -delta * static_cast<double>(j));
  // Spectrum of the linear basis over the window: Σ_χ χ e^{-j2πmχ/L}.
  std::vector<double> lin_basis(static_cast<std::size_t>(M) + 1, 0.0);
  for (long long m = 1; m <= M; ++m) {
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    lin_basis[static_cast<std::size_t>(m)] = (N + 0.5) * sgn / std::sin(pi * static_cast<double>(m) / L);
  }

  const std::span<const double> ph_tx(in.tx_phase.phi);
  const std::span<const double> ph_rx(in.rx_phase.phi);
  const std::span<const cplx> xw(s.x_mf);
  const FractionalDelay interp;
  const cplx j1{0.0, 1.0};
  const std::size_t chunks = (s.count + kChunk - 1) / kChunk;

  parallel_for(chunks, opt.threads, [&](std::size_t ci) {
    const std::size_t i_begin = ci * kChunk;
    const std::size_t i_end = std::min(s.count, i_begin + kChunk);
    const auto mod_l = [L](long long v) { return ((v % L) + L) % L; };

    // S_m = Σ_{u=t-N}^{t+N} φ_rx(u) e^{-j2πmu/L}, m = 1..M. A constant offset
    // in φ drops out for m ≠ 0, so the chunk's first sample is subtracted.
    long long t = static_cast<long long>(s.t_first + i_begin * static_cast<std::size_t>(s.hop));
    const double ref = ph_rx[static_cast<std::size_t>(t)];
    // The window covers each residue of u mod L once, so one L-point DFT of
    // the window laid out by residue gives every S_m.
    CVec S(static_cast<std::size_t>(L));
    for (long long u = t - N; u <= t + N; ++u) {
      S[static_cast<std::size_t>(mod_l(u))] = ph_rx[static_cast<std::size_t>(u)] - ref;
    }
    fft_inplace(S);

    std::vector<cplx> c(static_cast<std::size_t>(M) + 1);
    for (std::size_t i = i_begin; i < i_end; ++i) {
      if (i != i_begin) {
        for (int h = 0; h < s.hop; ++h) {
          ++t;
          const double d = ph_rx[static_cast<std::size_t>(t + N)] - ph_rx[static_cast<std::size_t>(t - N - 1)];
          const long long base = mod_l(t + N);
          long long idx = 0;
          for (long long m = 1; m <= M; ++m) {
            idx += base;
            if (idx >= L) idx -= L;
            S[static_cast<std::size_t>(m)] += d * tw[static_cast<std::size_t>(idx)];
          }
        }
      }
      const auto tu = static_cast<std::size_t>(t);
      const LineFit ft = fit_line(ph_tx, tu, N);
      const LineFit fr = fit_line(ph_rx, tu, N);
      const double a0 = ft.a0(), a1 = ft.slope;
      const double b0 = fr.a0(), b1 = fr.slope;
      const double td = static_cast<double>(t);

      // c_m = (e^{+j2πmt/L} S_m - b1 Σχe^{-j2πmχ/L}) / L
      {
        const long long base = mod_l(t);
        long long idx = 0;
        for (long long m = 1; m <= M; ++m) {
          idx += base;
          if (idx >= L) idx -= L;
          c[static_cast<std::size_t>(m)] =
              (std::conj(tw[static_cast<std::size_t>(idx)]) * S[static_cast<std::size_t>(m)] -
               cplx{0.0, b1 * lin_basis[static_cast<std::size_t>(m)]}) /
              static_cast<double>(L);
        }
      }

      auto n_tx = [&](double tau) { return (lerp_at(ph_tx, td + tau) - ft.ref) - ft.offset - a1 * tau; };

      const double tau0 = D * b1;
      const double lin = D * a1 * b1;
      const double quad = 0.5 * D * b1 * b1;
      const cplx x0 = interp(xw, td + tau0);
      out.phi0[i] = a0 + b0;
      out.x_terr[i] = x0 * std::polar(1.0, lin + quad);
      out.n_rot[i] = j1 * x0 * n_tx(tau0) * std::polar(1.0, lin + kappa * quad);

      // θ(m) = D a1 ω_m + (D/2) ω_m², ω_m = b1 + mΔ; walked outward in both directions.
      cplx rrn{0.0, 0.0};
      cplx xrn{0.0, 0.0};
      const double c1 = D * delta * (a1 + b1);
      const double c2 = 0.5 * D * delta * delta;
      for (int dir = -1; dir <= 1; dir += 2) {
        QuadPhasor ph(lin + quad, dir * c1, c2);
        // Extra (κ-1)(D/2)ω² of the printed convention.
        QuadPhasor extra((kappa - 1.0) * quad, dir * (kappa - 1.0) * D * b1 * delta, (kappa - 1.0) * c2);
        for (long long k = 1; k <= M; ++k) {
          ph.advance();
          if (printed) extra.advance();
          const double tau = D * (b1 + dir * delta * static_cast<double>(k));
          if (std::abs(tau) > N) continue;
          const cplx cm = dir > 0 ? c[static_cast<std::size_t>(k)] : std::conj(c[static_cast<std::size_t>(k)]);
          const cplx term = cm * interp(xw, td + tau) * ph.value;
          rrn += term;
          xrn += printed ? term * n_tx(tau) * extra.value : term * n_tx(tau);
        }
      }
      out.n_rrn[i] = j1 * rrn;
      out.n_xrn[i] = -xrn;
    }
  });
  return out;
}

EepnComponents decompose_reference(const LinkConfig& config, const LinkInputs& in, const WindowParams& window,
                                   const DecomposeOptions& opt, std::size_t first_output, std::size_t count) {
  const Setup s = prepare(config, in, window, opt);
  if (first_output + count > s.count) throw std::invalid_argument("decompose_reference: output range out of bounds");
  EepnComponents out = empty_components(s, in, opt, count);

  const int N = s.N;
  const auto L = static_cast<std::size_t>(s.L);
  const std::span<const double> ph_tx(in.tx_phase.phi);
  const std::span<const double> ph_rx(in.rx_phase.phi);
  const std::span<const cplx> xw(s.x_mf);
  const FractionalDelay interp;

  CVec win(L);
  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t i = first_output + r;
    const std::size_t t = s.t_first + i * static_cast<std::size_t>(s.hop);
    InstantParams p;
    p.D = s.D;
    p.N = N;
    p.convention = opt.convention;
    const LineFit ft = fit_line(ph_tx, t, N);
    const LineFit fr = fit_line(ph_rx, t, N);
    p.a0 = ft.a0();
    p.a1 = ft.slope;
    p.b0 = fr.a0();
    p.b1 = fr.slope;

    for (int chi = -N; chi <= N; ++chi) {
      const double v = (ph_rx[t + static_cast<std::size_t>(chi + N) - static_cast<std::size_t>(N)] - fr.ref) - fr.offset - p.b1 * chi;
      const std::size_t pos = chi >= 0 ? static_cast<std::size_t>(chi) : L - static_cast<std::size_t>(-chi);
      win[pos] = v;
    }
    fft_inplace(win);
    for (auto& v : win) v /= static_cast<double>(L);

    const double td = static_cast<double>(t);
    const auto x = [&](double tau) { return interp(xw, td + tau); };
    const auto n_tx = [&](double tau) { return (lerp_at(ph_tx, td + tau) - ft.ref) - ft.offset - p.a1 * tau; };
    const InstantTerms terms = evaluate_instant(x, n_tx, p, win);
    out.phi0[r] = terms.phi0;
    out.x_terr[r] = terms.x_terr;
    out.n_rot[r] = terms.n_rot;
    out.n_rrn[r] = terms.n_rrn;
    out.n_xrn[r] = terms.n_xrn;
  }
  out.first_symbol = in.offset;
  return out;
}

}  // namespace eepn
