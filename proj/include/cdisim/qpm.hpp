#pragma once

// Quasi-phase-matched SPDC: phase mismatch, the poling-profile integral, and
// the resulting signal power spectral density over wavelength and
// temperature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "cdisim/errors.hpp"
#include "cdisim/grating.hpp"
#include "cdisim/material.hpp"
#include "cdisim/parallel.hpp"
#include "cdisim/spectrum.hpp"
#include "cdisim/units.hpp"

namespace cdisim {

struct PumpConfig {
  double vacuum_wavelength_nm = 532.0;
  std::string power_tag = "2 W cw";

  double omega() const {
    if (!(vacuum_wavelength_nm > 0.0)) throw DomainError("pump wavelength must be positive");
    return omega_from_wavelength_nm(vacuum_wavelength_nm);
  }
};

namespace detail {

// Evaluated in the symmetric form
//   c·Δk = h(2n_p − n_hi − n_lo) − d(n_hi − n_lo),  h = ω_p/2, d = |ω_s − h|,
// which is algebraically the three-wave mismatch, identical for the signal
// and its idler, and exactly zero for a non-dispersive medium.
inline double phase_mismatch_with_pump_index(const DispersionModel& dispersion, double omega_p, double n_p,
                                             double omega_s, double temperature_c) {
  if (!(omega_s > 0.0) || !(omega_s < omega_p))
    throw DomainError("phase_mismatch: signal frequency must satisfy 0 < omega_s < omega_p");
  const double h = 0.5 * omega_p;
  const double d = std::abs(omega_s - h);
  const double n_hi = refractive_index(dispersion, h + d, temperature_c);
  const double n_lo = refractive_index(dispersion, h - d, temperature_c);
  return (h * (2.0 * n_p - n_hi - n_lo) - d * (n_hi - n_lo)) / kSpeedOfLightUmPerS;
}

/// Compensated complex sum.
struct KahanComplex {
  double re = 0.0, im = 0.0, c_re = 0.0, c_im = 0.0;

  void add(double x, double y) {
    const double yr = x - c_re;
    const double tr = re + yr;
    c_re = (tr - re) - yr;
    re = tr;
    const double yi = y - c_im;
    const double ti = im + yi;
    c_im = (ti - im) - yi;
    im = ti;
  }
  std::complex<double> value() const { return {re, im}; }
};

}  // namespace detail

/// Δk(ω_s, T) in rad/µm.
inline double phase_mismatch(const DispersionModel& dispersion, const PumpConfig& pump, double omega_s,
                             double temperature_c) {
  const double omega_p = pump.omega();
  const double n_p = refractive_index(dispersion, omega_p, temperature_c);
  return detail::phase_mismatch_with_pump_index(dispersion, omega_p, n_p, omega_s, temperature_c);
}

/// ∫₀ᴸ d(z) exp(−jΔk z) dz in µm, summed exactly over constant-sign segments.
///
/// A segment [s, e] contributes sign·(exp(−jΔk s) − exp(−jΔk e))/(jΔk); the
/// boundary phasors are shared by neighbouring segments. Where |Δk|·w is
/// small the difference cancels, so those segments use the equivalent
/// sign·w·sinc(Δk w/2)·exp(−jΔk(s + w/2)), with the series limit of sinc
/// below |Δk|·w = 1e-6.
inline std::complex<double> qpm_integral(const GratingRealization& grating, double delta_k) {
  constexpr double kDifferenceFormMin = 1e-2;
  detail::KahanComplex acc;
  const double inv_dk = delta_k != 0.0 ? 1.0 / delta_k : 0.0;
  bool have_left = false;
  double left_re = 0.0, left_im = 0.0;
  for (const auto& seg : grating.segments) {
    const double w = seg.width_um;
    const double kw = std::abs(delta_k) * w;
    if (kw < kDifferenceFormMin) {
      const double x = 0.5 * delta_k * w;
      const double sinc = kw < 1e-6 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
      const double phase = -delta_k * (seg.start_um + 0.5 * w);
      const double amp = seg.sign * w * sinc;
      acc.add(amp * std::cos(phase), amp * std::sin(phase));
      have_left = false;
      continue;
    }
    if (!have_left) {
      const double p = -delta_k * seg.start_um;
      left_re = std::cos(p);
      left_im = std::sin(p);
    }
    const double q = -delta_k * (seg.start_um + w);
    const double right_re = std::cos(q), right_im = std::sin(q);
    // (L − R)/(jΔk) = −j(L − R)/Δk
    const double dre = left_re - right_re, dim = left_im - right_im;
    acc.add(seg.sign * dim * inv_dk, -seg.sign * dre * inv_dk);
    left_re = right_re;
    left_im = right_im;
    have_left = true;
  }
  return acc.value();
}

/// S(ω_i) = |qpm_integral(grating at T, Δk(ω_i, T))|² on the given grid.
inline Spectrum spdc_spectrum(const DispersionModel& dispersion, const PumpConfig& pump,
                              const GratingRealization& grating, std::span<const double> omega_grid,
                              double temperature_c, Normalization normalization = Normalization::raw,
                              unsigned threads = 1) {
  Spectrum s;
  s.omega_grid.assign(omega_grid.begin(), omega_grid.end());
  s.density.assign(omega_grid.size(), 0.0);
  const double omega_p = pump.omega();
  const double n_p = refractive_index(dispersion, omega_p, temperature_c);
  parallel_for(omega_grid.size(), threads, [&](std::size_t i) {
    const double dk = detail::phase_mismatch_with_pump_index(dispersion, omega_p, n_p, omega_grid[i], temperature_c);
    s.density[i] = std::norm(qpm_integral(grating, dk));
  });
  validate(s);
  normalize(s, normalization);
  return s;
}

inline Spectrum spdc_spectrum(const DispersionModel& dispersion, const PumpConfig& pump, const GratingSpec& grating,
                              std::span<const double> omega_grid, double temperature_c,
                              Normalization normalization = Normalization::raw, unsigned threads = 1) {
  return spdc_spectrum(dispersion, pump, realize(grating, temperature_c), omega_grid, temperature_c, normalization,
                       threads);
}

/// Spectral density over (temperature × wavelength), normalized to a global maximum of 1.
struct BrightnessMap {
  std::vector<double> temperatures_c;
  std::vector<double> wavelengths_nm;
  std::vector<double> values;  // row-major, one row per temperature
  std::string normalization_note = "global maximum = 1";

  double at(std::size_t t, std::size_t w) const { return values[t * wavelengths_nm.size() + w]; }
  std::span<const double> row(std::size_t t) const {
    return {values.data() + t * wavelengths_nm.size(), wavelengths_nm.size()};
  }
};

inline BrightnessMap temperature_sweep(const DispersionModel& dispersion, const PumpConfig& pump,
                                       const GratingSpec& grating, std::span<const double> temperatures_c,
                                       std::span<const double> wavelengths_nm, unsigned threads = 1) {
  BrightnessMap map;
  map.temperatures_c.assign(temperatures_c.begin(), temperatures_c.end());
  map.wavelengths_nm.assign(wavelengths_nm.begin(), wavelengths_nm.end());
  const std::size_t nw = wavelengths_nm.size();
  map.values.assign(temperatures_c.size() * nw, 0.0);
  const auto omega = omega_grid_from_wavelengths(wavelengths_nm);
  const double omega_p = pump.omega();

  std::vector<GratingRealization> realizations(temperatures_c.size());
  std::vector<double> pump_index(temperatures_c.size());
  for (std::size_t t = 0; t < temperatures_c.size(); ++t) {
    realizations[t] = realize(grating, temperatures_c[t]);
    pump_index[t] = refractive_index(dispersion, omega_p, temperatures_c[t]);
  }
  parallel_for(map.values.size(), threads, [&](std::size_t k) {
    const std::size_t t = k / nw, w = k % nw;
    const double dk = detail::phase_mismatch_with_pump_index(dispersion, omega_p, pump_index[t], omega[w],
                                                             temperatures_c[t]);
    map.values[k] = std::norm(qpm_integral(realizations[t], dk));
  });
  const double peak = map.values.empty() ? 0.0 : *std::max_element(map.values.begin(), map.values.end());
  if (peak > 0.0)
    for (double& v : map.values) v /= peak;
  return map;
}

}  // namespace cdisim
