// Thin wrapper around FFTW's one-dimensional complex transforms.
//
// FFTW's planner is not thread-safe, so plan creation and destruction are
// serialized behind a library-wide mutex; executing a plan is thread-safe.
// Arbitrary (non power of two) lengths are supported.

#pragma once

#include <complex>
#include <span>
#include <vector>

namespace dlr::fft {

// X_k = sum_j x_j exp(-2 pi i j k / N)
std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x);

// x_j = sum_k X_k exp(+2 pi i j k / N)   (no 1/N scaling)
std::vector<std::complex<double>> inverse_unscaled(std::span<const std::complex<double>> x);

// Linear convolution of two real sequences, truncated to `n_out` leading
// terms; computed through zero-padded FFTs.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b, std::size_t n_out);

std::size_t next_pow2(std::size_t n);

}  // namespace dlr::fft
