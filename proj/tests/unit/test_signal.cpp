// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eepn/fft.hpp"
#include "eepn/random.hpp"
#include "eepn/signal.hpp"

using namespace eepn;

TEST_CASE("qam16 index 0 is the lower-left corner") {
  const SymbolFrame f = map_qam16(std::vector<int>{0});
  CHECK(f.symbols[0].real() == doctest::Approx(-3.0 / std::sqrt(10.0)).epsilon(1e-15));
  CHECK(f.symbols[0].imag() == doctest::Approx(-3.0 / std::sqrt(10.0)).epsilon(1e-15));
  CHECK(f.symbols[0].real() == doctest::Approx(-0.94868).epsilon(1e-5));
}

TEST_CASE("qam16 constellation has unit mean power and Gray neighbours") {
  const auto& pts = qam16_points();
  double p = 0.0;
  for (const auto& s : pts) p += std::norm(s);
  CHECK(p / 16.0 == doctest::Approx(1.0).epsilon(1e-15));
  // Horizontally adjacent points differ in one bit.
  const double step = 2.0 / std::sqrt(10.0);
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      const cplx d = pts[static_cast<std::size_t>(a)] - pts[static_cast<std::size_t>(b)];
      if (std::abs(std::abs(d) - step) < 1e-12) CHECK(__builtin_popcount(static_cast<unsigned>(a ^ b)) == 1);
    }
  }
  for (int i = 0; i < 16; ++i) CHECK(qam16_nearest(pts[static_cast<std::size_t>(i)] * 1.1) == i);
}

TEST_CASE("map_qam16 rejects out-of-range indices") {
  CHECK_THROWS_AS(map_qam16(std::vector<int>{16}), std::invalid_argument);
  CHECK_THROWS_AS(map_qam16(std::vector<int>{-1}), std::invalid_argument);
}

TEST_CASE("rrc taps have unit energy and a Nyquist cascade") {
  const int sps = 10;
  const auto h = rrc_taps(0.1, 64, sps);
  double e = 0.0;
  for (double v : h) e += v * v;
  CHECK(e == doctest::Approx(1.0).epsilon(1e-9));

  // h * h sampled at symbol spacing.
  const auto n = static_cast<long long>(h.size());
  auto cascade = [&](long long lag) {
    double s = 0.0;
    for (long long i = 0; i < n; ++i) {
      const long long j = i + lag;
      if (j >= 0 && j < n) s += h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(j)];
    }
    return s;
  };
  CHECK(cascade(0) == doctest::Approx(1.0).epsilon(1e-12));
  for (long long k = 1; k <= 20; ++k) CHECK(std::abs(cascade(k * sps)) < 1e-3);
}

TEST_CASE("rrc handles the singular instants") {
  for (double a : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    const auto h = rrc_taps(a, 16, 8);
    for (double v : h) CHECK(std::isfinite(v));
  }
  CHECK_THROWS(rrc_taps(1.5, 16, 8));
}

TEST_CASE("fft of constant and impulse") {
  const std::size_t L = 12;
  const CVec ones(L, cplx{1.0, 0.0});
  const CVec s = fft(ones);
  CHECK(std::abs(s[0] - cplx(static_cast<double>(L), 0.0)) < 1e-12);
  for (std::size_t k = 1; k < L; ++k) CHECK(std::abs(s[k]) < 1e-12);

  CVec imp(L);
  imp[0] = 1.0;
  for (const auto& v : fft(imp)) CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-15);

  CVec x(L);
  for (std::size_t i = 0; i < L; ++i) x[i] = {std::sin(0.3 * i), std::cos(1.7 * i)};
  const CVec back = ifft(fft(x));
  for (std::size_t i = 0; i < L; ++i) CHECK(std::abs(back[i] - x[i]) < 1e-14);
}

TEST_CASE("snr estimate") {
  Rng rng(42);
  const std::size_t n = 100000;
  CVec ref(n), rx(n);
  const auto& pts = qam16_points();
  for (std::size_t i = 0; i < n; ++i) ref[i] = pts[static_cast<std::size_t>(rng.integer(0, 15))];
  CHECK(snr_estimate(ref, ref) == kSaturatedSnrDb);

  for (std::size_t i = 0; i < n; ++i) rx[i] = ref[i] * std::polar(1.0, std::numbers::pi / 7.0);
  CHECK(snr_estimate(rx, ref) == kSaturatedSnrDb);

  const double sd = std::sqrt(0.1 * mean_power(ref) / 2.0);
  for (std::size_t i = 0; i < n; ++i) rx[i] = ref[i] + cplx{sd * rng.normal(), sd * rng.normal()};
  CHECK(snr_estimate(rx, ref) == doctest::Approx(10.0).epsilon(0.01));
  CHECK(std::abs(snr_estimate(rx, ref) - 10.0) < 0.1);

  CHECK_THROWS(snr_estimate(CVec{}, CVec{}));
  CHECK_THROWS(snr_estimate(CVec(3), CVec(4)));
}

TEST_CASE("nmse and evm") {
  const CVec a{{1.0, 0.0}, {0.0, 1.0}};
  CHECK(nmse_db(a, a) == -kSaturatedSnrDb);
  const CVec b{{1.1, 0.0}, {0.0, 1.1}};
  CHECK(nmse_db(b, a) == doctest::Approx(-20.0).epsilon(1e-12));
  CHECK(evm(b, a) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("pearson") {
  Rng rng(5);
  std::vector<double> x(10000), y(10000), nx(10000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.normal();
    y[i] = rng.normal();
    nx[i] = -x[i];
  }
  CHECK(pearson(x, x) == doctest::Approx(1.0));
  CHECK(pearson(x, nx) == doctest::Approx(-1.0));
  CHECK(std::abs(pearson(x, y)) < 0.05);
  CHECK_THROWS(pearson(std::vector<double>(5, 1.0), std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0}));
}
