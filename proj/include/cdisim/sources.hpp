#pragma once

// Light-source spectra fed to the interferometer.

#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cdisim/errors.hpp"
#include "cdisim/spectrum.hpp"
#include "cdisim/units.hpp"

namespace cdisim {

/// Gaussian line shape in optical frequency, centred at `center_nm` with a
/// FWHM of `fwhm_nm` expressed as a wavelength width at the centre:
/// Δω = 2πc·Δλ/λ₀². Its coherence envelope has FWHM (2 ln 2/π)·λ₀²/Δλ in
/// reference-arm displacement.
inline Spectrum gaussian_source(double center_nm, double fwhm_nm, std::span<const double> omega_grid) {
  if (!(center_nm > 0.0) || !(fwhm_nm > 0.0)) throw DomainError("gaussian source: center and FWHM must be positive");
  const double center = omega_from_wavelength_nm(center_nm);
  const double center_um = center_nm * 1e-3;
  const double fwhm_omega = kTwoPi * kSpeedOfLightUmPerS * (fwhm_nm * 1e-3) / (center_um * center_um);
  const double sigma = fwhm_omega / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  Spectrum s;
  s.omega_grid.assign(omega_grid.begin(), omega_grid.end());
  s.density.resize(omega_grid.size());
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    const double u = (omega_grid[i] - center) / sigma;
    s.density[i] = std::exp(-0.5 * u * u);
  }
  std::ostringstream label;
  label << "gaussian(" << center_nm << " nm, " << fwhm_nm << " nm)";
  s.label = label.str();
  s.normalization = Normalization::peak_one;
  validate(s);
  return s;
}

/// Superluminescent diode preset `sld930`: 930 nm centre, 70 nm FWHM.
inline Spectrum sld930_source(std::span<const double> omega_grid) {
  auto s = gaussian_source(930.0, 70.0, omega_grid);
  s.label = "sld930";
  return s;
}

/// Single-bin source at one wavelength.
inline Spectrum monochromatic_source(double wavelength_nm) {
  Spectrum s;
  s.omega_grid = {omega_from_wavelength_nm(wavelength_nm)};
  s.density = {1.0};
  s.label = "monochromatic";
  return s;
}

/// Spectrum from CSV rows `wavelength_nm,density` (optional header line).
inline Spectrum parse_spectrum_csv(const std::string& text) {
  std::vector<double> wl, density;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("spectrum_csv", line_no, "expected 'wavelength_nm,density'");
    try {
      const double a = std::stod(line.substr(0, comma));
      const double b = std::stod(line.substr(comma + 1));
      wl.push_back(a);
      density.push_back(b);
    } catch (const std::exception&) {
      if (wl.empty()) continue;  // header
      throw ConfigError("spectrum_csv", line_no, "non-numeric value");
    }
  }
  Spectrum s;
  s.omega_grid = omega_grid_from_wavelengths(wl);
  s.density = std::move(density);
  s.label = "tabulated";
  try {
    validate(s);
  } catch (const ConstructionError& e) {
    throw ConfigError("spectrum_csv", 0, e.what());
  }
  return s;
}

}  // namespace cdisim
