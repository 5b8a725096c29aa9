// SPDX-License-Identifier: Apache-2.0
#include "eepn/link.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "eepn/random.hpp"

namespace eepn {

int LinkConfig::samples_per_symbol() const {
  const double r = f_sim / symbol_rate;
  return static_cast<int>(std::lround(r));
}

void LinkConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("LinkConfig: " + what); };
  if (!(symbol_rate > 0.0)) fail("symbol_rate must be > 0");
  if (!(f_sim > 0.0)) fail("f_sim must be > 0");
  const double r = f_sim / symbol_rate;
  if (std::abs(r - std::round(r)) > 1e-9 * r) fail("f_sim must be an integer multiple of symbol_rate");
  if (std::lround(r) < 2) fail("oversampling factor f_sim/symbol_rate must be >= 2");
  if (rolloff < 0.0 || rolloff > 1.0) fail("rolloff must lie in [0, 1]");
  if (!std::isfinite(beta2)) fail("beta2 must be finite");
  if (!(length >= 0.0)) fail("length must be >= 0");
  if (!(linewidth_tx >= 0.0)) fail("linewidth_tx must be >= 0");
  if (!(linewidth_rx >= 0.0)) fail("linewidth_rx must be >= 0");
  if (std::isnan(baseline_snr_db) || baseline_snr_db == -INFINITY) fail("baseline_snr_db must be finite or +inf");
  if (num_symbols < 1) fail("num_symbols must be >= 1");
  if (rrc_span < 2) fail("rrc_span must be >= 2");
  if (guard_symbols < 0) fail("guard_symbols must be >= 0");
  if (half_window_symbols < 0) fail("half_window_symbols must be >= 0");
}

CVec cd_freq_response(std::span<const double> freqs, double beta2, double length) {
  CVec h(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double w = 2.0 * std::numbers::pi * freqs[i];
    h[i] = std::polar(1.0, -0.5 * beta2 * w * w * length);
  }
  return h;
}

double awgn_calibrate(const LinkConfig& config) {
  if (!config.awgn_enabled()) return 0.0;
  // The sps-scaled unit-energy matched filter leaves variance/sps per symbol.
  return config.samples_per_symbol() * std::pow(10.0, -config.baseline_snr_db / 10.0);
}

int cd_memory_symbols(const LinkConfig& c) {
  const double v = std::numbers::pi * std::abs(c.beta2) * c.length * c.symbol_rate * c.symbol_rate;
  return static_cast<int>(std::floor(v + 1e-9));
}

int half_window_symbols(const LinkConfig& c) {
  return c.half_window_symbols > 0 ? c.half_window_symbols : cd_memory_symbols(c);
}

std::size_t transient_symbols(const LinkConfig& c) {
  const int m = std::max({c.rrc_span, cd_memory_symbols(c), half_window_symbols(c)});
  return static_cast<std::size_t>(m + c.guard_symbols);
}

LinkInputs make_link_inputs(const LinkConfig& config) {
  config.validate();
  LinkInputs in;
  in.offset = transient_symbols(config);
  in.kept = config.num_symbols;
  const std::size_t total = in.kept + 2 * in.offset;

  Rng sym_rng(config.seed, Stream::Symbols);
  in.indices.resize(total);
  for (auto& v : in.indices) v = sym_rng.integer(0, 15);
  in.symbols = map_qam16(in.indices, config.symbol_rate);

  Rng init(config.seed, Stream::InitialPhase);
  const double phi0_tx = std::numbers::pi * (2.0 * init.uniform() - 1.0);
  const double phi0_rx = std::numbers::pi * (2.0 * init.uniform() - 1.0);

  const std::size_t samples = total * static_cast<std::size_t>(config.samples_per_symbol());
  in.tx_phase = gen_wiener(samples, config.linewidth_tx, config.f_sim, substream_seed(config.seed, Stream::TxPhase),
                           phi0_tx);
  in.rx_phase = gen_wiener(samples, config.linewidth_rx, config.f_sim, substream_seed(config.seed, Stream::RxPhase),
                           phi0_rx);
  return in;
}

namespace {

CVec rrc_response(const LinkConfig& c, std::size_t n) {
  const auto taps = rrc_taps(c.rolloff, c.rrc_span, c.samples_per_symbol());
  return centered_kernel_response(taps, n);
}

CVec white_noise(const LinkConfig& c, std::size_t n) {
  const double var = awgn_calibrate(c);
  CVec w(n);
  if (var == 0.0) return w;
  Rng rng(c.seed, Stream::Awgn);
  const double sd = std::sqrt(var / 2.0);
  for (auto& v : w) {
    const double re = rng.normal();
    const double im = rng.normal();
    v = {sd * re, sd * im};
  }
  return w;
}

}  // namespace

CVec reference_waveform(const LinkConfig& config, const SymbolFrame& symbols) {
  const int sps = config.samples_per_symbol();
  CVec x = upsample_zeros(symbols.symbols, sps);
  const CVec h = rrc_response(config, x.size());
  fft_inplace(x);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= h[i] * h[i];
  ifft_inplace(x);
  return x;
}

CVec filtered_noise(const LinkConfig& config, std::size_t n) {
  CVec w = white_noise(config, n);
  if (!config.awgn_enabled()) return w;
  const CVec h = rrc_response(config, n);
  const double g = 1.0 / std::sqrt(static_cast<double>(config.samples_per_symbol()));
  fft_inplace(w);
  for (std::size_t i = 0; i < n; ++i) w[i] *= h[i] * g;
  ifft_inplace(w);
  return w;
}

LinkRun simulate_link(const LinkConfig& config) { return simulate_link(config, make_link_inputs(config), true); }

LinkRun simulate_link(const LinkConfig& config, const LinkInputs& in, bool add_noise) {
  config.validate();
  const int sps = config.samples_per_symbol();
  const std::size_t n = in.symbols.size() * static_cast<std::size_t>(sps);
  if (in.tx_phase.size() != n || in.rx_phase.size() != n) {
    throw std::invalid_argument("simulate_link: phase traces do not match the waveform length");
  }

  const CVec h_rrc = rrc_response(config, n);
  const auto freqs = fft_frequencies(n, config.f_sim);
  const CVec h_cd = cd_freq_response(freqs, config.beta2, config.length);
  const double root_sps = std::sqrt(static_cast<double>(sps));

  // TX: shaping with unit power per sample, then the TX laser.
  CVec s = upsample_zeros(in.symbols.symbols, sps);
  fft_inplace(s);
  for (std::size_t i = 0; i < n; ++i) s[i] *= h_rrc[i] * root_sps;
  ifft_inplace(s);
  for (std::size_t i = 0; i < n; ++i) s[i] *= std::polar(1.0, in.tx_phase.phi[i]);

  // Fiber, then AWGN at the receiver input.
  fft_inplace(s);
  for (std::size_t i = 0; i < n; ++i) s[i] *= h_cd[i];
  ifft_inplace(s);
  if (add_noise && config.awgn_enabled()) {
    const CVec w = white_noise(config, n);
    for (std::size_t i = 0; i < n; ++i) s[i] += w[i];
  }

  // RX laser, ideal EDC and matched filter in one frequency-domain pass.
  for (std::size_t i = 0; i < n; ++i) s[i] *= std::polar(1.0, in.rx_phase.phi[i]);
  fft_inplace(s);
  for (std::size_t i = 0; i < n; ++i) s[i] *= std::conj(h_cd[i]) * h_rrc[i] / root_sps;
  ifft_inplace(s);

  LinkRun run;
  run.offset = in.offset;
  run.tx_phase = in.tx_phase;
  run.rx_phase = in.rx_phase;
  run.tx_symbols.symbol_rate = config.symbol_rate;
  run.rx_symbols.symbol_rate = config.symbol_rate;
  run.tx_symbols.symbols.assign(in.symbols.symbols.begin() + static_cast<std::ptrdiff_t>(in.offset),
                                in.symbols.symbols.begin() + static_cast<std::ptrdiff_t>(in.offset + in.kept));
  run.rx_symbols.symbols.resize(in.kept);
  for (std::size_t k = 0; k < in.kept; ++k) run.rx_symbols.symbols[k] = s[(in.offset + k) * static_cast<std::size_t>(sps)];
  run.rx_waveform = ComplexSignal(std::move(s), config.f_sim);
  return run;
}

CVec decimate_to_2sps(std::span<const cplx> waveform, const LinkConfig& config, std::size_t first_symbol,
                      std::size_t count) {
  const int sps = config.samples_per_symbol();
  if (sps % 2 != 0) throw std::invalid_argument("decimate_to_2sps: oversampling factor must be even");
  const auto half = static_cast<std::size_t>(sps / 2);
  const std::size_t start = first_symbol * static_cast<std::size_t>(sps);
  if (start + (2 * count - 1) * half >= waveform.size()) throw std::invalid_argument("decimate_to_2sps: range exceeds waveform");
  CVec out(2 * count);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = waveform[start + i * half];
  return out;
}

}  // namespace eepn
