#include "dlr/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace dlr::fft {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> x, int sign) {
  if (x.empty()) return {};
  const int n = static_cast<int>(x.size());
  fftw_complex* buf = fftw_alloc_complex(x.size());
  if (!buf) throw std::bad_alloc();
  std::memcpy(buf, x.data(), sizeof(fftw_complex) * x.size());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  }
  if (!plan) {
    fftw_free(buf);
    throw std::runtime_error("FFTW failed to create a plan of length " + std::to_string(n));
  }
  fftw_execute(plan);
  std::vector<std::complex<double>> out(x.size());
  std::memcpy(out.data(), buf, sizeof(fftw_complex) * x.size());
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x) {
  return transform(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> inverse_unscaled(std::span<const std::complex<double>> x) {
  return transform(x, FFTW_BACKWARD);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b, std::size_t n_out) {
  if (a.empty() || b.empty() || n_out == 0) return std::vector<double>(n_out, 0.0);
  const std::size_t full = a.size() + b.size() - 1;
  const std::size_t keep = std::min(n_out, full);
  const std::size_t n = next_pow2(full);
  std::vector<std::complex<double>> fa(n, 0.0), fb(n, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  auto Fa = forward(fa);
  auto Fb = forward(fb);
  for (std::size_t i = 0; i < n; ++i) Fa[i] *= Fb[i];
  auto prod = inverse_unscaled(Fa);
  std::vector<double> out(n_out, 0.0);
  for (std::size_t i = 0; i < keep; ++i) out[i] = prod[i].real() / static_cast<double>(n);
  return out;
}

}  // namespace dlr::fft
