#pragma once

// Sampled power spectral densities and half-maximum width analysis.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "cdisim/errors.hpp"
#include "cdisim/units.hpp"

namespace cdisim {

enum class Normalization { raw, peak_one, unit_area };

inline const char* to_string(Normalization n) {
  switch (n) {
    case Normalization::raw: return "raw";
    case Normalization::peak_one: return "peak-1";
    case Normalization::unit_area: return "unit-area";
  }
  return "?";
}

/// Spectral density sampled on a strictly monotone angular-frequency grid.
/// The density is per unit angular frequency.
struct Spectrum {
  std::vector<double> omega_grid;  // rad/s
  std::vector<double> density;
  Normalization normalization = Normalization::raw;
  std::string label;
  std::vector<std::string> warnings;

  std::size_t size() const { return omega_grid.size(); }

  std::vector<double> wavelengths_nm() const {
    std::vector<double> out(omega_grid.size());
    std::transform(omega_grid.begin(), omega_grid.end(), out.begin(), wavelength_nm_from_omega);
    return out;
  }
};

inline void validate(const Spectrum& s) {
  if (s.omega_grid.empty()) throw ConstructionError("spectrum: empty grid");
  if (s.density.size() != s.omega_grid.size()) throw ConstructionError("spectrum: density/grid size mismatch");
  const bool up = s.omega_grid.size() < 2 || s.omega_grid[1] > s.omega_grid[0];
  for (std::size_t i = 1; i < s.omega_grid.size(); ++i) {
    if (up ? !(s.omega_grid[i] > s.omega_grid[i - 1]) : !(s.omega_grid[i] < s.omega_grid[i - 1]))
      throw ConstructionError("spectrum: grid must be strictly monotone");
  }
  for (double d : s.density)
    if (!(d >= 0.0) || !std::isfinite(d)) throw ConstructionError("spectrum: density must be finite and >= 0");
}

/// Angular-frequency grid for wavelengths lo, lo+step, ..., <= hi (nm).
/// The grid runs in decreasing ω because wavelength increases.
inline std::vector<double> omega_grid_from_wavelengths(double lo_nm, double hi_nm, double step_nm) {
  if (!(lo_nm > 0.0) || !(hi_nm >= lo_nm) || !(step_nm > 0.0))
    throw ConstructionError("wavelength grid: need 0 < lo <= hi and step > 0");
  const auto n = static_cast<std::size_t>(std::floor((hi_nm - lo_nm) / step_nm + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = omega_from_wavelength_nm(lo_nm + static_cast<double>(i) * step_nm);
  return grid;
}

inline std::vector<double> omega_grid_from_wavelengths(std::span<const double> wavelengths_nm) {
  std::vector<double> grid(wavelengths_nm.size());
  std::transform(wavelengths_nm.begin(), wavelengths_nm.end(), grid.begin(), omega_from_wavelength_nm);
  return grid;
}

/// Trapezoid weights on an arbitrary monotone grid; a single node gets weight 1.
inline std::vector<double> trapezoid_weights(std::span<const double> grid) {
  std::vector<double> w(grid.size(), 0.0);
  if (grid.size() == 1) {
    w[0] = 1.0;
    return w;
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = 0.5 * std::abs(grid[i + 1] - grid[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

inline void normalize(Spectrum& s, Normalization n) {
  if (n == Normalization::peak_one) {
    const double peak = *std::max_element(s.density.begin(), s.density.end());
    if (peak > 0.0)
      for (double& d : s.density) d /= peak;
  } else if (n == Normalization::unit_area) {
    const auto w = trapezoid_weights(s.omega_grid);
    double area = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) area += w[i] * s.density[i];
    if (area > 0.0)
      for (double& d : s.density) d /= area;
  }
  s.normalization = n;
}

/// An interval where a sampled curve is at or above a threshold, in
/// fractional sample indices obtained by linear interpolation of crossings.
struct SupportInterval {
  double begin;
  double end;
  std::size_t peak_index;
  bool touches_edge = false;
};

/// Maximal runs of samples >= threshold, with interpolated crossing points.
inline std::vector<SupportInterval> support_intervals(std::span<const double> values, double threshold) {
  std::vector<SupportInterval> out;
  const std::size_t n = values.size();
  std::size_t i = 0;
  while (i < n) {
    if (values[i] < threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::size_t peak = i;
    while (j + 1 < n && values[j + 1] >= threshold) {
      ++j;
      if (values[j] > values[peak]) peak = j;
    }
    SupportInterval iv{static_cast<double>(i), static_cast<double>(j), peak};
    if (i > 0) {
      const double a = values[i - 1], b = values[i];
      iv.begin = static_cast<double>(i - 1) + (threshold - a) / (b - a);
    } else {
      iv.touches_edge = true;
    }
    if (j + 1 < n) {
      const double a = values[j], b = values[j + 1];
      iv.end = static_cast<double>(j) + (a - threshold) / (a - b);
    } else {
      iv.touches_edge = true;
    }
    out.push_back(iv);
    i = j + 1;
  }
  return out;
}

/// Half-maximum support intervals of a curve relative to its global maximum.
inline std::vector<SupportInterval> half_max_intervals(std::span<const double> values) {
  if (values.empty()) return {};
  const double peak = *std::max_element(values.begin(), values.end());
  if (!(peak > 0.0)) return {};
  return support_intervals(values, 0.5 * peak);
}

/// Linear interpolation of a grid at a fractional index.
inline double at_fraction(std::span<const double> grid, double index) {
  if (grid.size() == 1) return grid[0];
  const auto i = static_cast<std::size_t>(std::clamp(std::floor(index), 0.0, static_cast<double>(grid.size() - 2)));
  const double f = index - static_cast<double>(i);
  return grid[i] + f * (grid[i + 1] - grid[i]);
}

struct SpectralWidth {
  double fwhm_omega = 0.0;  // rad/s
  double fwhm_nm = 0.0;
  double center_omega = 0.0;  // midpoint of the half-max crossings
  double center_nm = 0.0;
  double peak_omega = 0.0;
  bool multimodal = false;  // more than one disjoint half-max interval
  bool truncated = false;   // the main interval reaches the grid edge
  std::size_t interval_count = 0;
};

/// FWHM of the highest peak. Crossings are interpolated linearly between
/// bracketing samples; both the ω and wavelength forms use the same
/// fractional crossing indices.
inline SpectralWidth spectral_fwhm(const Spectrum& spectrum) {
  validate(spectrum);
  const auto intervals = half_max_intervals(spectrum.density);
  if (intervals.empty()) throw UndefinedWidthError("spectral_fwhm: spectrum is identically zero");
  const auto peak = static_cast<std::size_t>(
      std::max_element(spectrum.density.begin(), spectrum.density.end()) - spectrum.density.begin());
  const auto main = std::find_if(intervals.begin(), intervals.end(),
                                 [&](const SupportInterval& iv) { return iv.peak_index == peak; });
  const auto wl = spectrum.wavelengths_nm();
  SpectralWidth w;
  const double w0 = at_fraction(spectrum.omega_grid, main->begin);
  const double w1 = at_fraction(spectrum.omega_grid, main->end);
  const double l0 = at_fraction(wl, main->begin);
  const double l1 = at_fraction(wl, main->end);
  w.fwhm_omega = std::abs(w1 - w0);
  w.fwhm_nm = std::abs(l1 - l0);
  w.center_omega = 0.5 * (w0 + w1);
  w.center_nm = 0.5 * (l0 + l1);
  w.peak_omega = spectrum.omega_grid[peak];
  w.interval_count = intervals.size();
  w.multimodal = intervals.size() > 1;
  w.truncated = main->touches_edge;
  return w;
}

/// Linear resampling of (x, y) onto new abscissae; x must be monotone.
/// Points outside the source range get `fill`.
inline std::vector<double> resample_linear(std::span<const double> x, std::span<const double> y,
                                           std::span<const double> x_new, double fill = 0.0) {
  std::vector<double> out(x_new.size(), fill);
  if (x.empty()) return out;
  const bool up = x.size() < 2 || x[1] > x[0];
  for (std::size_t k = 0; k < x_new.size(); ++k) {
    const double q = x_new[k];
    const auto it = up ? std::lower_bound(x.begin(), x.end(), q)
                       : std::lower_bound(x.begin(), x.end(), q, std::greater<>());
    const auto i = static_cast<std::size_t>(it - x.begin());
    if (i < x.size() && x[i] == q) {
      out[k] = y[i];
    } else if (i > 0 && i < x.size()) {
      const double f = (q - x[i - 1]) / (x[i] - x[i - 1]);
      out[k] = y[i - 1] + f * (y[i] - y[i - 1]);
    }
  }
  return out;
}

}  // namespace cdisim
