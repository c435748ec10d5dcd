#pragma once

#include <complex>
#include <vector>

namespace chirpsense {

// Complex DFT of arbitrary length (FFTW behind the scenes).
// fft_forward is unnormalized; fft_inverse applies the 1/n factor so
// fft_inverse(fft_forward(x)) == x up to rounding.
std::vector<std::complex<double>> fft_forward(const std::vector<std::complex<double>>& in);
std::vector<std::complex<double>> fft_inverse(const std::vector<std::complex<double>>& in);

}  // namespace chirpsense
