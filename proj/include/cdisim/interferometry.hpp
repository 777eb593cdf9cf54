#pragma once

// Michelson low-coherence interferometry: interferogram synthesis for
// layered samples, envelope / resolution analysis, and Fourier-transform
// spectrum estimation.
//
// Convention: x is the reference-arm position and d the one-way optical depth
// of a sample interface. The round trip doubles the path difference, so an
// interface at depth d produces fringes cos(2ω(x − d)/c) centred on x = d,
// with displacement period λ/2.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdisim/detection.hpp"
#include "cdisim/errors.hpp"
#include "cdisim/fft.hpp"
#include "cdisim/interferogram.hpp"
#include "cdisim/spectrum.hpp"
#include "cdisim/units.hpp"

namespace cdisim {

struct Interface {
  double optical_depth_um;
  double reflectance;  // amplitude, in [−1, 1]
};

struct SampleResponse {
  std::vector<Interface> interfaces;
  std::vector<std::string> warnings;
};

inline void validate(SampleResponse& sample) {
  double power = 0.0;
  for (std::size_t i = 0; i < sample.interfaces.size(); ++i) {
    const auto& f = sample.interfaces[i];
    if (!(f.optical_depth_um >= 0.0)) throw ConstructionError("sample: interface depths must be non-negative");
    if (i > 0 && !(f.optical_depth_um > sample.interfaces[i - 1].optical_depth_um))
      throw ConstructionError("sample: interface depths must be strictly increasing");
    if (!(f.reflectance >= -1.0 && f.reflectance <= 1.0))
      throw ConstructionError("sample: amplitude reflectance must lie in [-1, 1]");
    power += f.reflectance * f.reflectance;
  }
  if (power > 1.0) sample.warnings.push_back("sample: total reflected power exceeds 1 (not passive)");
}

inline SampleResponse mirror_response(double depth_um, double reflectance = 1.0) {
  SampleResponse s{{{depth_um, reflectance}}, {}};
  validate(s);
  return s;
}

/// Thin film of index n and thickness L at normal incidence: front face at
/// depth 0 with r₁ = (1 − n)/(1 + n), back face at optical depth n·L with
/// r₂ = (n − 1)/(n + 1) reduced by the front transmission (1 − r₁²).
inline SampleResponse pellicle_response(double n, double thickness_um) {
  if (!(n > 1.0)) throw DomainError("pellicle: refractive index must exceed 1");
  if (!(thickness_um > 0.0)) throw DomainError("pellicle: thickness must be positive");
  const double r1 = (1.0 - n) / (1.0 + n);
  const double r2 = (n - 1.0) / (n + 1.0) * (1.0 - r1 * r1);
  SampleResponse s{{{0.0, r1}, {n * thickness_um, r2}}, {}};
  validate(s);
  return s;
}

namespace detail {

/// Σ_j u_j cos(2ω_j (x_i − depth)/c) over a uniform x grid, by phasor rotation
/// with an exact re-anchor every 256 steps.
inline void accumulate_fringe(std::span<const double> omega, std::span<const double> weight, double x0, double dx,
                              double depth, double scale, std::span<double> out) {
  constexpr std::size_t kAnchor = 256;
  const std::size_t n = out.size();
  for (std::size_t j = 0; j < omega.size(); ++j) {
    const double u = weight[j] * scale;
    if (u == 0.0) continue;
    const double q = 2.0 * omega[j] / kSpeedOfLightUmPerS;
    const std::complex<double> rot = std::polar(1.0, q * dx);
    std::complex<double> p;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % kAnchor == 0) p = std::polar(1.0, q * ((x0 + static_cast<double>(i) * dx) - depth));
      out[i] += u * p.real();
      p *= rot;
    }
  }
}

}  // namespace detail

/// Ideal detected intensity for reference reflectance R_ref:
///
///   I(x) = ∫ ŝ(ω) [R_ref + Σ r_i² + 2√R_ref Σ r_i cos(2ω(x − d_i)/c)
///                  + 2 Σ_{i<k} r_i r_k cos(2ω(d_k − d_i)/c)] dω
///
/// where ŝ = S·η / ∫S·η is the detected spectral shape normalized to unit
/// area. The spectrum-weighted QE ∫S·η / ∫S is returned in `band_qe`, so the
/// photon rate is flux·band_qe·I(x).
inline Interferogram ideal_interferogram(const Spectrum& source, const QeCurve& detector_qe,
                                         const SampleResponse& sample, std::span<const double> displacement_grid,
                                         double reference_reflectance = 1.0) {
  validate(source);
  if (!(reference_reflectance >= 0.0 && reference_reflectance <= 1.0))
    throw DomainError("reference reflectance must lie in [0, 1]");
  Interferogram out;
  out.displacement_um.assign(displacement_grid.begin(), displacement_grid.end());
  const double dx = displacement_grid.size() > 1 ? uniform_step(out.displacement_um) : 0.0;
  out.step_um = dx;

  const auto w = trapezoid_weights(source.omega_grid);
  std::vector<double> u(source.size());
  double detected = 0.0, total = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    total += w[j] * source.density[j];
    u[j] = w[j] * source.density[j] * detector_qe.at_omega(source.omega_grid[j]);
    detected += u[j];
  }
  if (!(detected > 0.0)) throw DomainError("ideal_interferogram: source and detector QE do not overlap");
  double centroid = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    u[j] /= detected;
    centroid += u[j] * source.omega_grid[j];
  }
  out.band_qe = detected / total;
  out.center_wavelength_nm = wavelength_nm_from_omega(centroid);

  // Drop bins that carry no detected power.
  std::vector<double> omega_kept, u_kept;
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (u[j] > 0.0) {
      omega_kept.push_back(source.omega_grid[j]);
      u_kept.push_back(u[j]);
    }
  }

  double dc = reference_reflectance;
  for (const auto& f : sample.interfaces) dc += f.reflectance * f.reflectance;
  const auto& itf = sample.interfaces;
  for (std::size_t i = 0; i < itf.size(); ++i) {
    for (std::size_t k = i + 1; k < itf.size(); ++k) {
      double coherence = 0.0;
      const double q = 2.0 * (itf[k].optical_depth_um - itf[i].optical_depth_um) / kSpeedOfLightUmPerS;
      for (std::size_t j = 0; j < omega_kept.size(); ++j) coherence += u_kept[j] * std::cos(omega_kept[j] * q);
      dc += 2.0 * itf[i].reflectance * itf[k].reflectance * coherence;
    }
  }
  out.values.assign(displacement_grid.size(), dc);
  const double x0 = displacement_grid.empty() ? 0.0 : displacement_grid[0];
  const double cross = 2.0 * std::sqrt(reference_reflectance);
  for (const auto& f : itf)
    detail::accumulate_fringe(omega_kept, u_kept, x0, dx, f.optical_depth_um, cross * f.reflectance, out.values);

  if (itf.empty()) {
    out.dc_only = true;
    out.warnings.push_back("sample has no interfaces: DC-only trace");
  }
  return out;
}

struct Peak {
  double position_um;
  double height;
  double prominence;
};

struct EnvelopeOptions {
  double center_wavelength_nm = 0.0;  // 0: use the interferogram's metadata
  double min_prominence = 0.2;        // fraction of the envelope maximum
  double smoothing_um = 0.0;          // Gaussian σ applied to the envelope; 0 = none
};

struct EnvelopeResult {
  std::vector<double> envelope;
  std::vector<Peak> peaks;  // sorted by position
  std::optional<double> fwhm_of_main_peak_um;
  double main_peak_um = 0.0;
  std::vector<SupportInterval> half_max_support;  // of the global maximum, in grid indices

  double fwhm() const {
    if (!fwhm_of_main_peak_um) throw UndefinedWidthError("envelope is identically zero: FWHM undefined");
    return *fwhm_of_main_peak_um;
  }
};

namespace detail {

inline std::vector<double> gaussian_smooth(std::span<const double> x, double sigma_samples) {
  if (!(sigma_samples > 0.0)) return {x.begin(), x.end()};
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma_samples));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  for (std::ptrdiff_t k = -half; k <= half; ++k)
    kernel[static_cast<std::size_t>(k + half)] = std::exp(-0.5 * (k / sigma_samples) * (k / sigma_samples));
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> out(x.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0, norm = 0.0;
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      const auto j = i + k;
      if (j < 0 || j >= n) continue;
      const double g = kernel[static_cast<std::size_t>(k + half)];
      acc += g * x[static_cast<std::size_t>(j)];
      norm += g;
    }
    out[static_cast<std::size_t>(i)] = acc / norm;
  }
  return out;
}

/// Local maxima with topographic prominence >= threshold.
inline std::vector<std::pair<std::size_t, double>> prominent_maxima(std::span<const double> y, double threshold) {
  std::vector<std::pair<std::size_t, double>> out;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || y[i] > y[i - 1];
    const bool right_ok = i + 1 == n || y[i] >= y[i + 1];
    if (!left_ok || !right_ok) continue;
    double left_min = y[i], right_min = y[i];
    bool left_higher = false, right_higher = false;
    for (std::size_t j = i; j-- > 0;) {
      if (y[j] > y[i]) {
        left_higher = true;
        break;
      }
      left_min = std::min(left_min, y[j]);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (y[j] > y[i]) {
        right_higher = true;
        break;
      }
      right_min = std::min(right_min, y[j]);
    }
    // A side that never meets higher ground does not bound the prominence.
    double base;
    if (left_higher && right_higher)
      base = std::max(left_min, right_min);
    else if (left_higher)
      base = left_min;
    else if (right_higher)
      base = right_min;
    else
      base = std::min(left_min, right_min);
    const double prominence = y[i] - base;
    if (prominence >= threshold && prominence > 0.0) out.emplace_back(i, prominence);
  }
  return out;
}

/// Vertex of the parabola through three neighbouring samples, as an offset in samples.
inline double parabolic_offset(std::span<const double> y, std::size_t i) {
  if (i == 0 || i + 1 >= y.size()) return 0.0;
  const double a = y[i - 1], b = y[i], c = y[i + 1];
  const double denom = a - 2.0 * b + c;
  if (denom >= 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
}

}  // namespace detail

/// Envelope of an interferogram: DC removed, then the magnitude of the
/// analytic signal. Requires at least four samples per fringe period at the
/// centre wavelength.
inline EnvelopeResult envelope(const Interferogram& trace, const EnvelopeOptions& options = {}) {
  if (trace.values.size() != trace.displacement_um.size())
    throw ConstructionError("interferogram: values/grid size mismatch");
  const double step = uniform_step(trace.displacement_um);
  const double center_nm = options.center_wavelength_nm > 0.0 ? options.center_wavelength_nm : trace.center_wavelength_nm;
  if (center_nm > 0.0) {
    const double required = center_nm * 1e-3 / 8.0;  // fringe period λ/2, four samples
    if (step > required * (1.0 + 1e-9))
      throw SamplingError("envelope: step " + std::to_string(step) + " um undersamples the fringes; need <= " +
                              std::to_string(required) + " um",
                          required);
  }

  const std::size_t n = trace.values.size();
  const double mean = std::accumulate(trace.values.begin(), trace.values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> ac(n);
  for (std::size_t i = 0; i < n; ++i) ac[i] = trace.values[i] - mean;

  EnvelopeResult r;
  r.envelope = analytic_magnitude(ac);
  if (options.smoothing_um > 0.0) r.envelope = detail::gaussian_smooth(r.envelope, options.smoothing_um / step);

  const auto& env = r.envelope;
  const auto top = static_cast<std::size_t>(std::max_element(env.begin(), env.end()) - env.begin());
  const double peak = env[top];
  if (!(peak > 1e-12 * std::max(1.0, std::abs(mean)))) return r;

  for (const auto& [i, prom] : detail::prominent_maxima(env, options.min_prominence * peak)) {
    const double off = detail::parabolic_offset(env, i);
    r.peaks.push_back({trace.displacement_um[i] + off * step, env[i], prom});
  }
  r.main_peak_um = trace.displacement_um[top] + detail::parabolic_offset(env, top) * step;

  const double half = 0.5 * peak;
  std::size_t lo = top, hi = top;
  while (lo > 0 && env[lo - 1] >= half) --lo;
  while (hi + 1 < n && env[hi + 1] >= half) ++hi;
  double left = static_cast<double>(lo), right = static_cast<double>(hi);
  if (lo > 0) left = static_cast<double>(lo - 1) + (half - env[lo - 1]) / (env[lo] - env[lo - 1]);
  if (hi + 1 < n) right = static_cast<double>(hi) + (env[hi] - half) / (env[hi] - env[hi + 1]);
  r.fwhm_of_main_peak_um = (right - left) * step;
  r.half_max_support = half_max_intervals(env);
  return r;
}

struct EstimateOptions {
  std::vector<double> wavelengths_nm;  // output grid; empty = 700–1500 nm at 0.5 nm
  bool hann_window = false;
  std::size_t zero_pad_factor = 8;
};

/// Fourier magnitude of the DC-removed interferogram, which is proportional
/// to the detected spectrum S·η. Fringe frequency f (cycles per µm of
/// displacement) maps to wavelength λ = 2/f, i.e. ω = πc·f; the result is
/// normalized to a peak of 1.
inline Spectrum estimate_spectrum(const Interferogram& trace, const EstimateOptions& options = {}) {
  const double step = uniform_step(trace.displacement_um);
  const std::size_t n = trace.values.size();
  std::vector<double> wavelengths = options.wavelengths_nm;
  if (wavelengths.empty()) {
    for (double l = 700.0; l <= 1500.0 + 1e-9; l += 0.5) wavelengths.push_back(l);
  }

  const double mean = std::accumulate(trace.values.begin(), trace.values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> ac(n);
  double amp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ac[i] = trace.values[i] - mean;
    amp = std::max(amp, std::abs(ac[i]));
  }
  Spectrum s;
  const std::size_t edge = std::max<std::size_t>(1, n / 50);
  double edge_amp = 0.0;
  for (std::size_t i = 0; i < edge; ++i) edge_amp = std::max({edge_amp, std::abs(ac[i]), std::abs(ac[n - 1 - i])});
  if (amp > 0.0 && edge_amp > 0.05 * amp)
    s.warnings.push_back("estimate_spectrum: fringes reach the record edges; record may be too short (leakage)");
  if (options.hann_window) {
    for (std::size_t i = 0; i < n; ++i)
      ac[i] *= 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1));
  }

  const std::size_t m = std::bit_ceil(std::max<std::size_t>(n * std::max<std::size_t>(1, options.zero_pad_factor), 2));
  const auto spec = fft_real(ac, m);
  const std::size_t half = m / 2;
  std::vector<double> freq(half + 1), magnitude(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    freq[k] = static_cast<double>(k) / (static_cast<double>(m) * step);
    magnitude[k] = std::abs(spec[k]);
  }

  std::vector<double> f_query(wavelengths.size());
  bool beyond_nyquist = false;
  for (std::size_t i = 0; i < wavelengths.size(); ++i) {
    f_query[i] = 2.0 / (wavelengths[i] * 1e-3);
    if (f_query[i] > freq.back()) beyond_nyquist = true;
  }
  if (beyond_nyquist) s.warnings.push_back("estimate_spectrum: part of the wavelength grid lies beyond Nyquist");

  s.omega_grid = omega_grid_from_wavelengths(wavelengths);
  s.density = resample_linear(freq, magnitude, f_query, 0.0);
  s.label = "estimate";
  validate(s);
  normalize(s, Normalization::peak_one);
  return s;
}

}  // namespace cdisim
