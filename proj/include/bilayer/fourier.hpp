// fourier.hpp — 2D inverse discrete Fourier transform on an n × n torus (FFTW)

#pragma once

#include <complex>
#include <vector>

namespace bilayer {

/// out[ny·n + nx] = (1/n²) Σ_{jx,jy} in[jy·n + jx] · exp(+2πi (jx·nx + jy·ny)/n).
/// Plans use FFTW_ESTIMATE so results are reproducible run to run.
std::vector<std::complex<double>> inverse_dft_2d(const std::vector<std::complex<double>>& in, int n);

/// Same transform for real input.
std::vector<std::complex<double>> inverse_dft_2d(const std::vector<double>& in, int n);

} // namespace bilayer
