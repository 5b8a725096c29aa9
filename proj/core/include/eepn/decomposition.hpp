// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <cstdint>
#include <span>
#include <vector>

#include "eepn/link.hpp"
#include "eepn/phase_noise.hpp"
#include "eepn/signal.hpp"

namespace eepn {

/// Regression window and dispersion memory, all half-lengths.
struct WindowParams {
  int N = 0;     // samples at f_sim
  int N_S = 0;   // symbols
  int N_CD = 0;  // symbols
};

/// N_CD = ⌊π|β₂|ℓR_S²⌋; N_S from config.half_window_symbols (0 = N_CD); N = N_S·sps.
WindowParams cd_memory(const LinkConfig& config);

/// Dispersion in sample units, β₂ℓf_sim². A slope ω in rad/sample turns into
/// a delay of D·ω samples.
double dispersion_samples(const LinkConfig& config);

/// Phase exponent applied to the TX-residual terms. Derived carries D/2 like
/// the timing-error term; AsPrinted carries 3D/2.
enum class PhaseConvention { Derived, AsPrinted };

inline double phase_kappa(PhaseConvention c) { return c == PhaseConvention::Derived ? 1.0 : 3.0; }

/// Kaiser-windowed sinc interpolator on a uniform grid. Weights come from a
/// polyphase table with linear blending between neighbouring phases.
class FractionalDelay {
 public:
  static constexpr int kDefaultTaps = 16;

  explicit FractionalDelay(int taps = kDefaultTaps, int phases = 4096, double kaiser_beta = 8.0);

  /// x evaluated at real index t; samples outside [0, size) count as zero.
  cplx operator()(std::span<const cplx> x, double t) const;
  int taps() const { return taps_; }

 private:
  int taps_;
  int phases_;
  std::vector<double> table_;  // (phases + 1) rows of taps
};

/// Linear interpolation of a real sequence at real index t (clamped at the ends).
double lerp_at(std::span<const double> x, double t);

/// Timing-error prediction of the linearized receiver: for each symbol,
/// e^{j(a0+b0)} x(t + D b1) e^{j D a1 b1} e^{j (D/2) b1²}, x being the
/// noise-free matched-filter waveform at f_sim.
SymbolFrame predict_linearized(std::span<const cplx> x_mf, const RegressionTrace& reg_tx,
                               const RegressionTrace& reg_rx, const LinkConfig& config, std::size_t first_symbol,
                               std::size_t count);

/// Per-instant four-term decomposition of the received signal.
/// y = e^{jφ0}(x_terr + n_rot + n_rrn + n_xrn).
struct EepnComponents {
  std::vector<double> phi0;
  CVec x_terr;
  CVec n_rot;
  CVec n_rrn;
  CVec n_xrn;
  int outputs_per_symbol = 1;
  std::size_t first_symbol = 0;  // index into the full frame of output 0

  std::size_t size() const { return phi0.size(); }
};

enum TermMask : unsigned {
  kTermRot = 1u,
  kTermRrn = 2u,
  kTermXrn = 4u,
  kTermAll = 7u,
};

/// e^{jφ0}(x_terr + selected terms).
CVec synthesize(const EepnComponents& c, unsigned mask = kTermAll);
SymbolFrame synthesize_frame(const EepnComponents& c, double symbol_rate, unsigned mask = kTermAll);

struct DecomposeOptions {
  int outputs_per_symbol = 1;  // 1 for symbol rate, 2 for the timing-recovery input
  PhaseConvention convention = PhaseConvention::Derived;
  int threads = 1;
};

/// Fast path: direct line fits per instant, sliding DFT of the RX phase over the
/// window, recurrences for the per-bin phase. Output covers the kept block of
/// `inputs`. Fails if N_S < N_CD.
EepnComponents decompose(const LinkConfig& config, const LinkInputs& inputs, const WindowParams& window,
                         const DecomposeOptions& options = {});

/// Slow path for verification: explicit regression, FFT of the residual
/// window and direct trigonometry at each requested output index.
EepnComponents decompose_reference(const LinkConfig& config, const LinkInputs& inputs, const WindowParams& window,
                                   const DecomposeOptions& options, std::size_t first_output, std::size_t count);

// --- single-instant evaluation ----------------------------------------------

struct InstantParams {
  double a0 = 0.0, a1 = 0.0, b0 = 0.0, b1 = 0.0;  // rad, rad/sample
  double D = 0.0;                                // samples² / rad
  int N = 0;                                     // half window, samples
  PhaseConvention convention = PhaseConvention::Derived;
};

struct InstantTerms {
  double phi0 = 0.0;
  cplx x_terr, n_rot, n_rrn, n_xrn;
};

/// Evaluates the four terms at one instant. `x(τ)` returns the signal at
/// offset τ (samples) from the instant, `n_tx(τ)` the TX residual there, and
/// `c` holds the RX residual window spectrum c_m = (1/L) Σ_χ n_rx(χ) e^{-j2πmχ/L}
/// in transform order, L = 2N+1. Bins whose delay leaves the window are dropped.
template <class X, class NTx>
InstantTerms evaluate_instant(const X& x, const NTx& n_tx, const InstantParams& p, std::span<const cplx> c) {
  const auto L = static_cast<long long>(c.size());
  const double kappa = phase_kappa(p.convention);
  const double two_pi_over_l = 2.0 * std::numbers::pi / static_cast<double>(L);
  const cplx j{0.0, 1.0};

  InstantTerms out;
  out.phi0 = p.a0 + p.b0;
  const double tau0 = p.D * p.b1;
  const cplx x0 = x(tau0);
  const double lin = p.D * p.a1 * p.b1;
  const double quad = 0.5 * p.D * p.b1 * p.b1;
  out.x_terr = x0 * std::polar(1.0, lin + quad);
  out.n_rot = j * x0 * n_tx(tau0) * std::polar(1.0, lin + kappa * quad);

  cplx rrn{0.0, 0.0};
  cplx xrn{0.0, 0.0};
  for (long long k = 0; k < L; ++k) {
    const long long m = (k <= (L - 1) / 2) ? k : k - L;
    if (m == 0) continue;
    const double w = p.b1 + two_pi_over_l * static_cast<double>(m);
    const double tau = p.D * w;
    if (std::abs(tau) > p.N) continue;
    const cplx xv = x(tau) * c[static_cast<std::size_t>(k)];
    const double l = p.D * p.a1 * w;
    const double q = 0.5 * p.D * w * w;
    rrn += xv * std::polar(1.0, l + q);
    xrn += xv * n_tx(tau) * std::polar(1.0, l + kappa * q);
  }
  out.n_rrn = j * rrn;
  out.n_xrn = -xrn;
  return out;
}

}  // namespace eepn
