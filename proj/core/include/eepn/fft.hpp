// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

namespace eepn {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Discrete Fourier transform shared by every module.
///
/// Convention: unnormalized forward transform X[k] = sum_n x[n] e^{-j2πkn/L},
/// inverse carries the 1/L factor. Any length L >= 1 is accepted.
CVec fft(std::span<const cplx> x);
CVec ifft(std::span<const cplx> spectrum);

void fft_inplace(CVec& x);
void ifft_inplace(CVec& x);

/// Signed bin frequencies of an L-point DFT at the given sample rate,
/// in the same order as the transform output (0, df, ..., -df).
std::vector<double> fft_frequencies(std::size_t length, double sample_rate);

}  // namespace eepn
