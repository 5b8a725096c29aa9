// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "eepn/link.hpp"

using namespace eepn;

TEST_CASE("dispersion response") {
  const std::vector<double> f{0.0, 10e9, -10e9};
  const CVec h = cd_freq_response(f, -21.67e-27, 4000e3);
  CHECK(std::abs(h[0] - cplx(1.0, 0.0)) < 1e-15);
  const double raw = 0.5 * 21.67e-27 * std::pow(2.0 * std::numbers::pi * 10e9, 2) * 4000e3;
  CHECK(std::abs(raw - 171.13) < 0.05);
  CHECK(std::arg(h[1]) == doctest::Approx(std::remainder(raw, 2.0 * std::numbers::pi)).epsilon(1e-9));
  CHECK(std::abs(std::remainder(raw, 2.0 * std::numbers::pi) - 1.47) < 0.05);
  CHECK(std::abs(h[1] - h[2]) < 1e-15);
  for (const auto& v : h) CHECK(std::abs(v) == doctest::Approx(1.0));
}

TEST_CASE("CD memory") {
  LinkConfig c;
  CHECK(cd_memory_symbols(c) == 2723);
  c.length = 5000e3;
  CHECK(cd_memory_symbols(c) == 3403);
  c.length = 2000e3;
  CHECK(cd_memory_symbols(c) == 1361);
  c.length = 0.0;
  CHECK(cd_memory_symbols(c) == 0);
}

TEST_CASE("config validation names the field") {
  LinkConfig c;
  c.rolloff = 1.5;
  try {
    c.validate();
    FAIL("accepted rolloff 1.5");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("rolloff") != std::string::npos);
  }
  LinkConfig d;
  d.f_sim = 1.05e12;
  CHECK_THROWS(d.validate());
}

TEST_CASE("AWGN calibration") {
  LinkConfig c;
  const double v = awgn_calibrate(c);
  c.f_sim = 2e12;
  CHECK(awgn_calibrate(c) == doctest::Approx(2.0 * v).epsilon(1e-14));
  c.baseline_snr_db = std::numeric_limits<double>::infinity();
  CHECK(awgn_calibrate(c) == 0.0);
  CHECK_FALSE(c.awgn_enabled());
}

TEST_CASE("laser-free noiseless link is an identity") {
  LinkConfig c;
  c.linewidth_tx = c.linewidth_rx = 0.0;
  c.baseline_snr_db = std::numeric_limits<double>::infinity();
  c.num_symbols = 3000;
  const LinkRun run = simulate_link(c);
  CHECK(run.rx_symbols.size() == 3000);
  // Only the initial phases remain; the fit removes them.
  CHECK(snr_estimate(run.rx_symbols, run.tx_symbols) > 60.0);
  const double rot = run.tx_phase.phi0 + run.rx_phase.phi0;
  CVec derot(run.rx_symbols.symbols);
  for (auto& v : derot) v *= std::polar(1.0, -rot);
  CHECK(nmse_db(derot, run.tx_symbols.symbols) < -60.0);
}

TEST_CASE("laser-free link with AWGN hits the baseline SNR") {
  LinkConfig c;
  c.linewidth_tx = c.linewidth_rx = 0.0;
  c.num_symbols = 200000;
  c.seed = 2;
  const LinkRun run = simulate_link(c);
  CHECK(std::abs(snr_estimate(run.rx_symbols, run.tx_symbols) - 13.7) < 0.1);
}

TEST_CASE("dispersion-free link is a pure rotation") {
  LinkConfig c;
  c.length = 0.0;
  c.baseline_snr_db = std::numeric_limits<double>::infinity();
  c.num_symbols = 5000;
  const LinkRun run = simulate_link(c);
  const auto sps = static_cast<std::size_t>(c.samples_per_symbol());
  CVec expect(run.tx_symbols.size());
  for (std::size_t k = 0; k < expect.size(); ++k) {
    const std::size_t t = (run.offset + k) * sps;
    expect[k] = run.tx_symbols.symbols[k] * std::polar(1.0, run.tx_phase.phi[t] + run.rx_phase.phi[t]);
  }
  CHECK(nmse_db(run.rx_symbols.symbols, expect) < -40.0);
}

TEST_CASE("inputs are reproducible and streams independent") {
  LinkConfig c;
  c.num_symbols = 500;
  const LinkInputs a = make_link_inputs(c);
  const LinkInputs b = make_link_inputs(c);
  CHECK(a.indices == b.indices);
  CHECK(a.tx_phase.phi == b.tx_phase.phi);
  LinkConfig d = c;
  d.linewidth_tx = 0.0;
  const LinkInputs e = make_link_inputs(d);
  CHECK(e.indices == a.indices);
  CHECK(e.rx_phase.phi == a.rx_phase.phi);
  CHECK(a.offset == transient_symbols(c));
  CHECK(transient_symbols(c) == static_cast<std::size_t>(2723 + c.guard_symbols));
}

TEST_CASE("2 sps decimation") {
  LinkConfig c;
  CVec w(1000);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(i);
  const CVec z = decimate_to_2sps(w, c, 3, 10);
  CHECK(z.size() == 20);
  CHECK(z[0].real() == 30.0);
  CHECK(z[1].real() == 35.0);
  CHECK(z[2].real() == 40.0);
  CHECK_THROWS(decimate_to_2sps(w, c, 95, 10));
}
