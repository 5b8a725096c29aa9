// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "eepn/decomposition.hpp"
#include "eepn/fft.hpp"
#include "eepn/random.hpp"

using namespace eepn;
using std::numbers::pi;

namespace {

// Band-limited periodic test signal given by its signed DFT bins.
struct Periodic {
  std::size_t P;
  CVec bins;  // transform order, unnormalized

  cplx at(double t) const {
    cplx s{0.0, 0.0};
    const auto n = static_cast<long long>(P);
    for (long long k = 0; k < n; ++k) {
      const long long m = k <= (n - 1) / 2 ? k : k - n;
      s += bins[static_cast<std::size_t>(k)] * std::polar(1.0, 2.0 * pi * static_cast<double>(m) * t / static_cast<double>(n));
    }
    return s / static_cast<double>(n);
  }
  CVec samples() const { return ifft(bins); }
};

Periodic random_band(std::size_t P, int band, bool real, double scale, Rng& rng) {
  Periodic p{P, CVec(P)};
  for (int m = -band; m <= band; ++m) {
    const auto k = static_cast<std::size_t>(m >= 0 ? m : static_cast<long long>(P) + m);
    p.bins[k] = scale * static_cast<double>(P) * cplx{rng.normal(), rng.normal()};
  }
  if (real) {
    const CVec s = p.samples();
    CVec r(P);
    for (std::size_t i = 0; i < P; ++i) r[i] = s[i].real();
    p.bins = fft(r);
  }
  return p;
}

// H^{-1}{ r · H{g} } with H(ω) = e^{-j(D/2)ω²} on the periodic grid.
CVec dispersive_tone(const CVec& g, const CVec& r, double D) {
  const std::size_t P = g.size();
  const auto n = static_cast<long long>(P);
  auto apply = [&](CVec v, double sign) {
    fft_inplace(v);
    for (long long k = 0; k < n; ++k) {
      const long long m = k <= (n - 1) / 2 ? k : k - n;
      const double w = 2.0 * pi * static_cast<double>(m) / static_cast<double>(n);
      v[static_cast<std::size_t>(k)] *= std::polar(1.0, -sign * 0.5 * D * w * w);
    }
    ifft_inplace(v);
    return v;
  };
  CVec z = apply(g, 1.0);
  for (std::size_t i = 0; i < P; ++i) z[i] *= r[i];
  return apply(z, -1.0);
}

struct Toy {
  std::size_t P = 129;  // one window, L = 2N+1
  int N = 64;
  std::size_t t0 = 40;
  double a0 = 0.3, b0 = -0.2;
  double a1 = 2.0 * pi * 1.0 / 129.0, b1 = 2.0 * pi * 2.0 / 129.0;  // whole cycles, so the tones stay periodic
  double D = 3.0;
  Periodic x, ntx, nrx;

  Toy() {
    Rng rng(2024);
    x = random_band(P, 8, false, 1.0, rng);
    ntx = random_band(P, 6, true, 0.05, rng);
    nrx = random_band(P, 10, true, 0.05, rng);
    nrx.bins[0] = 0.0;  // a regression residual has no mean over the window
  }
};

}  // namespace

TEST_CASE("four-term sum is the first-order expansion of the link") {
  const Toy toy;
  const std::size_t P = toy.P;
  const CVec xs = toy.x.samples();
  const CVec ns_tx = toy.ntx.samples();
  const CVec ns_rx = toy.nrx.samples();
  const cplx j{0.0, 1.0};

  CVec g0(P), g1(P), r0(P), r1(P);
  for (std::size_t t = 0; t < P; ++t) {
    const double dt = static_cast<double>(t) - static_cast<double>(toy.t0);
    const cplx ea = std::polar(1.0, toy.a0 + toy.a1 * dt);
    const cplx eb = std::polar(1.0, toy.b0 + toy.b1 * dt);
    g0[t] = ea * xs[t];
    g1[t] = j * ns_tx[t].real() * ea * xs[t];
    r0[t] = eb;
    r1[t] = j * ns_rx[t].real() * eb;
  }
  const cplx y0 = dispersive_tone(g0, r0, toy.D)[toy.t0];
  const cplx y_tx = dispersive_tone(g1, r0, toy.D)[toy.t0];
  const cplx y_rx = dispersive_tone(g0, r1, toy.D)[toy.t0];
  const cplx y_x = dispersive_tone(g1, r1, toy.D)[toy.t0];

  // RX residual spectrum over the window χ = -N..N centred on t0.
  const auto L = static_cast<std::size_t>(2 * toy.N + 1);
  CVec win(L);
  for (std::size_t k = 0; k < L; ++k) {
    const long long chi = static_cast<long long>(k) <= toy.N ? static_cast<long long>(k) : static_cast<long long>(k) - static_cast<long long>(L);
    win[k] = ns_rx[static_cast<std::size_t>((static_cast<long long>(toy.t0) + chi + static_cast<long long>(P)) % static_cast<long long>(P))].real();
  }
  CVec c = fft(win);
  for (auto& v : c) v /= static_cast<double>(L);

  auto xf = [&](double tau) { return toy.x.at(static_cast<double>(toy.t0) + tau); };
  auto nf = [&](double tau) { return toy.ntx.at(static_cast<double>(toy.t0) + tau).real(); };
  InstantParams p;
  p.a0 = toy.a0;
  p.a1 = toy.a1;
  p.b0 = toy.b0;
  p.b1 = toy.b1;
  p.D = toy.D;
  p.N = toy.N;

  SUBCASE("derived convention matches every term") {
    const InstantTerms t = evaluate_instant(xf, nf, p, c);
    const cplx rot = std::polar(1.0, t.phi0);
    const double scale = std::abs(y0);
    CHECK(std::abs(rot * t.x_terr - y0) < 1e-9 * scale);
    CHECK(std::abs(rot * t.n_rot - y_tx) < 1e-9 * scale);
    CHECK(std::abs(rot * t.n_rrn - y_rx) < 1e-9 * scale);
    CHECK(std::abs(rot * t.n_xrn - y_x) < 1e-9 * scale);
    CHECK(std::abs(y_tx) > 1e-3 * scale);  // the terms are not trivially small
    CHECK(std::abs(y_x) > 1e-5 * scale);
  }
  SUBCASE("printed 3/2 exponent does not") {
    p.convention = PhaseConvention::AsPrinted;
    const InstantTerms t = evaluate_instant(xf, nf, p, c);
    const cplx rot = std::polar(1.0, t.phi0);
    const double scale = std::abs(y0);
    CHECK(std::abs(rot * t.x_terr - y0) < 1e-9 * scale);
    CHECK(std::abs(rot * t.n_rrn - y_rx) < 1e-9 * scale);
    CHECK(std::abs(rot * t.n_rot - y_tx) > 1e-4 * std::abs(y_tx));
    CHECK(std::abs(rot * t.n_xrn - y_x) > 1e-4 * std::abs(y_x));
  }
}

namespace {

LinkConfig small_link() {
  LinkConfig c;
  c.length = 5000e3;
  c.num_symbols = 3000;
  c.baseline_snr_db = std::numeric_limits<double>::infinity();
  c.seed = 31;
  return c;
}

}  // namespace

TEST_CASE("window parameters") {
  const WindowParams w = cd_memory(small_link());
  CHECK(w.N_CD == 3403);
  CHECK(w.N_S == 3403);
  CHECK(w.N == 34030);
  CHECK(dispersion_samples(LinkConfig{}) == doctest::Approx(-8.668e4).epsilon(1e-4));

  LinkConfig c = small_link();
  c.half_window_symbols = 1000;
  const LinkInputs in = make_link_inputs(c);
  try {
    decompose(c, in, cd_memory(c));
    FAIL("accepted N_S < N_CD");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("N_S = 1000 < N_CD = 3403") != std::string::npos);
  }
}

TEST_CASE("fractional delay is exact on the grid and band-limited between") {
  const FractionalDelay d;
  CVec x(400);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::polar(1.0, 0.2 * static_cast<double>(i));
  CHECK(std::abs(d(x, 200.0) - x[200]) < 1e-12);
  const cplx mid = d(x, 200.37);
  CHECK(std::abs(mid - std::polar(1.0, 0.2 * 200.37)) < 1e-4);
  CHECK(std::abs(d(x, -50.0)) == 0.0);
}

TEST_CASE("zero linewidths give the noise-free reference") {
  LinkConfig c = small_link();
  c.linewidth_tx = c.linewidth_rx = 0.0;
  c.num_symbols = 500;
  const LinkInputs in = make_link_inputs(c);
  const EepnComponents d = decompose(c, in, cd_memory(c));
  REQUIRE(d.size() == 500);
  const CVec x = reference_waveform(c, in.symbols);
  const auto sps = static_cast<std::size_t>(c.samples_per_symbol());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(std::abs(d.x_terr[i] - x[(in.offset + i) * sps]) < 1e-12);
    CHECK(d.n_rot[i] == cplx{0.0, 0.0});
    CHECK(d.n_rrn[i] == cplx{0.0, 0.0});
    CHECK(d.n_xrn[i] == cplx{0.0, 0.0});
  }
  const CVec y = synthesize(d);
  CVec tx(in.symbols.symbols.begin() + static_cast<std::ptrdiff_t>(in.offset),
          in.symbols.symbols.begin() + static_cast<std::ptrdiff_t>(in.offset + 500));
  for (auto& v : tx) v *= std::polar(1.0, in.tx_phase.phi0 + in.rx_phase.phi0);
  CHECK(nmse_db(y, tx) < -60.0);
}

TEST_CASE("TX linewidth zero removes the TX residual terms exactly") {
  LinkConfig c = small_link();
  c.linewidth_tx = 0.0;
  c.num_symbols = 500;
  const LinkInputs in = make_link_inputs(c);
  const EepnComponents d = decompose(c, in, cd_memory(c));
  double prrn = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d.n_rot[i] == cplx{0.0, 0.0});
    CHECK(d.n_xrn[i] == cplx{0.0, 0.0});
    prrn += std::norm(d.n_rrn[i]);
  }
  CHECK(prrn > 0.0);
}

TEST_CASE("fast path agrees with the reference evaluator") {
  LinkConfig c = small_link();
  c.num_symbols = 400;
  const LinkInputs in = make_link_inputs(c);
  const WindowParams w = cd_memory(c);
  for (auto conv : {PhaseConvention::Derived, PhaseConvention::AsPrinted}) {
    DecomposeOptions opt;
    opt.outputs_per_symbol = 2;
    opt.convention = conv;
    const EepnComponents fast = decompose(c, in, w, opt);
    for (std::size_t first : {std::size_t{0}, std::size_t{397}, std::size_t{795}}) {
      const EepnComponents ref = decompose_reference(c, in, w, opt, first, 4);
      for (std::size_t r = 0; r < 4; ++r) {
        const std::size_t i = first + r;
        CHECK(fast.phi0[i] == doctest::Approx(ref.phi0[r]).epsilon(1e-9));
        CHECK(std::abs(fast.x_terr[i] - ref.x_terr[r]) < 1e-9);
        CHECK(std::abs(fast.n_rot[i] - ref.n_rot[r]) < 1e-6 * std::abs(ref.n_rot[r]) + 1e-12);
        CHECK(std::abs(fast.n_rrn[i] - ref.n_rrn[r]) < 1e-6 * std::abs(ref.n_rrn[r]) + 1e-12);
        CHECK(std::abs(fast.n_xrn[i] - ref.n_xrn[r]) < 1e-6 * std::abs(ref.n_xrn[r]) + 1e-12);
      }
    }
  }
}

TEST_CASE("decomposition does not depend on the thread count") {
  LinkConfig c = small_link();
  c.length = 1000e3;
  c.num_symbols = 9000;  // more than one chunk at 2 outputs per symbol
  const LinkInputs in = make_link_inputs(c);
  DecomposeOptions a;
  a.outputs_per_symbol = 2;
  a.threads = 1;
  DecomposeOptions b = a;
  b.threads = 4;
  const EepnComponents x = decompose(c, in, cd_memory(c), a);
  const EepnComponents y = decompose(c, in, cd_memory(c), b);
  CHECK(x.n_rrn == y.n_rrn);
  CHECK(x.n_xrn == y.n_xrn);
  CHECK(x.x_terr == y.x_terr);
}

TEST_CASE("term powers and ablations at 150 kHz, 5000 km") {
  LinkConfig c = small_link();
  const LinkInputs in = make_link_inputs(c);
  const EepnComponents d = decompose(c, in, cd_memory(c));
  const std::size_t n = d.size();

  double p_err = 0.0, p_rot = 0.0, p_rrn = 0.0, p_xrn = 0.0;
  std::size_t right = 0;
  CVec tx(n);
  for (std::size_t i = 0; i < n; ++i) {
    tx[i] = in.symbols.symbols[in.offset + i];
    p_err += std::norm(d.x_terr[i] - tx[i]);
    p_rot += std::norm(d.n_rot[i]);
    p_rrn += std::norm(d.n_rrn[i]);
    p_xrn += std::norm(d.n_xrn[i]);
    right += qam16_nearest(d.x_terr[i]) == in.indices[in.offset + i] ? 1 : 0;
  }
  CHECK(p_err > 0.0);
  CHECK(p_rot > 0.0);
  CHECK(p_xrn < 0.01 * p_rrn);
  CHECK(static_cast<double>(right) / static_cast<double>(n) >= 0.99);

  // Output NMSE against the derotated reference, with and without n_xrn.
  auto out_nmse = [&](unsigned mask) {
    CVec y = synthesize(d, mask);
    for (std::size_t i = 0; i < n; ++i) y[i] *= std::polar(1.0, -d.phi0[i]);
    return nmse_db(y, tx);
  };
  CHECK(std::abs(out_nmse(kTermAll) - out_nmse(kTermRot | kTermRrn)) < 0.1);
}

TEST_CASE("x_terr magnitude ignores the TX laser, n_rrn power scales with the RX linewidth") {
  LinkConfig c = small_link();
  c.num_symbols = 1500;
  const WindowParams w = cd_memory(c);
  const EepnComponents base = decompose(c, make_link_inputs(c), w);

  LinkConfig tx4 = c;
  tx4.linewidth_tx = 4.0 * c.linewidth_tx;
  const EepnComponents a = decompose(tx4, make_link_inputs(tx4), w);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(std::abs(a.x_terr[i]) == doctest::Approx(std::abs(base.x_terr[i])).epsilon(1e-12));
  }

  LinkConfig rx4 = c;
  rx4.linewidth_rx = 4.0 * c.linewidth_rx;
  const EepnComponents b = decompose(rx4, make_link_inputs(rx4), w);
  double p1 = 0.0, p4 = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    p1 += std::norm(base.n_rrn[i]);
    p4 += std::norm(b.n_rrn[i]);
  }
  CHECK(p4 / p1 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("linearized prediction") {
  LinkConfig c = small_link();
  c.num_symbols = 300;
  c.linewidth_tx = c.linewidth_rx = 0.0;
  const LinkInputs in = make_link_inputs(c);
  const CVec x = reference_waveform(c, in.symbols);
  const int N = cd_memory(c).N;
  const RegressionTrace rt = sliding_regression(in.tx_phase, N);
  const RegressionTrace rr = sliding_regression(in.rx_phase, N);
  const SymbolFrame y = predict_linearized(x, rt, rr, c, in.offset, 300);
  REQUIRE(y.size() == 300);
  const double rot = in.tx_phase.phi0 + in.rx_phase.phi0;
  for (std::size_t k = 0; k < 300; ++k) {
    CHECK(std::abs(y.symbols[k] * std::polar(1.0, -rot) - x[(in.offset + k) * 10]) < 1e-10);  // running-sum rounding
  }

  // Pure RX frequency offset: a delay of D·ω samples and a constant phase.
  const double omega = 2e-5;  // rad/sample
  std::vector<double> ramp(in.rx_phase.size());
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = omega * static_cast<double>(i);
  const RegressionTrace rf = sliding_regression(ramp, N);
  const std::vector<double> zeros(in.tx_phase.size(), 0.0);
  const RegressionTrace rz = sliding_regression(zeros, N);
  const SymbolFrame s = predict_linearized(x, rz, rf, c, in.offset, 50);
  const double D = dispersion_samples(c);
  const FractionalDelay fd;
  for (std::size_t k = 0; k < 50; ++k) {
    const std::size_t t = (in.offset + k) * 10;
    const cplx expect = fd(x, static_cast<double>(t) + D * omega) * std::polar(1.0, omega * t + 0.5 * D * omega * omega);
    CHECK(std::abs(s.symbols[k] - expect) < 1e-9);
  }
}
