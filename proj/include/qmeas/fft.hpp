#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

// Thin wrappers over FFTW. Plans are built per call with FFTW_ESTIMATE, so
// results depend only on the input sizes and data.
namespace qmeas::fft {

/// Full linear convolution sum_j x[j] y[k - j], k < x.size() + y.size() - 1,
/// computed through a zero-padded real transform.
std::vector<double> linear_convolution(std::span<const double> x, std::span<const double> y);

/// In-place unnormalized DFT with kernel exp(sign * 2 pi i j k / n), sign = +-1.
void transform_1d(std::span<std::complex<double>> data, int sign);

/// In-place unnormalized 2-D DFT over a row-major rows x cols array.
void transform_2d(std::span<std::complex<double>> data, std::size_t rows, std::size_t cols, int sign);

}  // namespace qmeas::fft
