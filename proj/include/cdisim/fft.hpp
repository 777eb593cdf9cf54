#pragma once

// Thin RAII wrapper over FFTW for one-shot complex transforms.

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <complex>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace cdisim {

namespace detail {

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  fftw_complex* data;
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace detail

enum class FftDirection { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

/// Unnormalized DFT, X_k = Σ x_n exp(∓2πi nk/N). Buffers are FFTW-aligned so
/// the chosen codelets, and therefore the rounding, do not vary between calls.
inline std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input, FftDirection direction) {
  const std::size_t n = input.size();
  std::vector<std::complex<double>> out(n);
  if (n == 0) return out;
  detail::FftwBuffer in_buf(n), out_buf(n);
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), in_buf.data, out_buf.data, static_cast<int>(direction),
                            FFTW_ESTIMATE);
  }
  std::memcpy(in_buf.data, input.data(), n * sizeof(fftw_complex));
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(out.data()), out_buf.data, n * sizeof(fftw_complex));
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

inline std::vector<std::complex<double>> fft_real(std::span<const double> input, std::size_t padded_size = 0) {
  std::vector<std::complex<double>> buf(std::max(padded_size, input.size()));
  for (std::size_t i = 0; i < input.size(); ++i) buf[i] = input[i];
  return fft(buf, FftDirection::forward);
}

/// Magnitude of the analytic signal of a real sequence (FFT-based discrete
/// Hilbert transform). The input is zero-padded to at least twice its length
/// so the transform does not wrap one edge onto the other.
inline std::vector<double> analytic_magnitude(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t m = std::bit_ceil(2 * n);
  auto spec = fft_real(x, m);
  // keep DC and Nyquist, double positive frequencies, zero negative ones
  for (std::size_t k = 1; k < m; ++k) {
    if (2 * k < m)
      spec[k] *= 2.0;
    else if (2 * k > m)
      spec[k] = 0.0;
  }
  const auto analytic = fft(spec, FftDirection::backward);
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(analytic[i]) / static_cast<double>(m);
  return mag;
}

}  // namespace cdisim
