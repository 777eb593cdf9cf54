#pragma once

#include <numbers>

namespace cdisim {

/// Speed of light in vacuum, µm/s.
inline constexpr double kSpeedOfLightUmPerS = 2.99792458e14;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angular frequency (rad/s) of a vacuum wavelength given in nm.
constexpr double omega_from_wavelength_nm(double wavelength_nm) {
  return kTwoPi * kSpeedOfLightUmPerS / (wavelength_nm * 1e-3);
}

constexpr double wavelength_nm_from_omega(double omega) {
  return kTwoPi * kSpeedOfLightUmPerS / omega * 1e3;
}

constexpr double wavelength_um_from_omega(double omega) {
  return kTwoPi * kSpeedOfLightUmPerS / omega;
}

}  // namespace cdisim
