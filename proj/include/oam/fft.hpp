#pragma once

#include <complex>
#include <span>

namespace oam {

enum class FftDirection { forward, inverse };

/// In-place unnormalized 2-D DFT of an n x n row-major array (FFTW backend,
/// estimate-mode plans cached per size). forward uses exp(-2 pi i jk/n).
/// Safe to call concurrently; results depend only on the input.
void fft2d(std::span<std::complex<double>> data, int n, FftDirection dir);

}  // namespace oam
