// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "eepn/phase_noise.hpp"
#include "eepn/signal.hpp"

namespace eepn {

/// Physical and simulation parameters, SI units throughout.
struct LinkConfig {
  double symbol_rate = 100e9;     // Hz
  double f_sim = 1e12;            // Hz
  double rolloff = 0.1;
  double beta2 = -21.67e-27;      // s²/m
  double length = 4000e3;         // m
  double linewidth_tx = 150e3;    // Hz
  double linewidth_rx = 150e3;    // Hz
  double baseline_snr_db = 13.7;  // +inf disables AWGN
  std::size_t num_symbols = 50000;  // kept symbols, after trimming
  std::uint64_t seed = 1;

  int rrc_span = 64;           // symbols
  int guard_symbols = 32;      // extra margin beyond the largest filter/window memory
  int half_window_symbols = 0; // N_S of the regression window; 0 selects N_CD

  int samples_per_symbol() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool awgn_enabled() const { return std::isfinite(baseline_snr_db); }
};

/// Symbols actually driven through the link and the phase traces seen by them.
/// `symbols` includes `offset` guard symbols on both sides of the kept block.
struct LinkInputs {
  SymbolFrame symbols;
  std::vector<int> indices;
  PhaseTrace tx_phase;
  PhaseTrace rx_phase;
  std::size_t offset = 0;
  std::size_t kept = 0;
};

struct LinkRun {
  SymbolFrame tx_symbols;  // kept block
  SymbolFrame rx_symbols;  // kept block, sampled at the ideal phase
  PhaseTrace tx_phase;     // full length, f_sim
  PhaseTrace rx_phase;
  ComplexSignal rx_waveform{CVec(1), 1.0};  // matched-filter output at f_sim, full length
  std::size_t offset = 0;  // index of the first kept symbol in the full frame
};

/// exp(-j (β₂/2)(2πf)² ℓ).
CVec cd_freq_response(std::span<const double> freqs, double beta2, double length);

/// Per-sample complex AWGN variance at f_sim that yields baseline_snr_db at
/// the symbol-rate output of the unit-energy matched filter.
double awgn_calibrate(const LinkConfig& config);

/// CD memory ⌊π|β₂|ℓR_S²⌋ in symbols.
int cd_memory_symbols(const LinkConfig& config);

/// Effective regression half window in symbols.
int half_window_symbols(const LinkConfig& config);

/// Guard symbols trimmed at each end.
std::size_t transient_symbols(const LinkConfig& config);

/// Draws symbols, phase traces and the initial laser phases from config.seed.
LinkInputs make_link_inputs(const LinkConfig& config);

/// Full-rate chain: shape, TX laser, dispersion, AWGN, RX laser, ideal EDC,
/// matched filter, ideal-phase downsampling.
LinkRun simulate_link(const LinkConfig& config);
LinkRun simulate_link(const LinkConfig& config, const LinkInputs& inputs, bool add_noise = true);

/// Noise-free, phase-free matched-filter output at f_sim (raised-cosine
/// shaped symbols), full length of inputs.symbols.
CVec reference_waveform(const LinkConfig& config, const SymbolFrame& symbols);

/// White AWGN of awgn_calibrate() variance passed through the matched
/// filter and the output scaling, f_sim, drawn from the Awgn substream.
CVec filtered_noise(const LinkConfig& config, std::size_t num_samples);

/// Picks every (sps/2)-th sample starting at the first kept symbol, giving
/// 2·count samples with symbol k at index 2k.
CVec decimate_to_2sps(std::span<const cplx> waveform, const LinkConfig& config, std::size_t first_symbol,
                      std::size_t count);

}  // namespace eepn
