#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cdisim/errors.hpp"

namespace cdisim {

enum class InterferogramKind { ideal_intensity, photon_counts };

/// Detector signal against reference-arm displacement on a uniform grid.
struct Interferogram {
  std::vector<double> displacement_um;
  std::vector<double> values;
  double step_um = 0.0;
  double window_s = 0.0;
  InterferogramKind kind = InterferogramKind::ideal_intensity;

  // Metadata filled in by the synthesis routines.
  double center_wavelength_nm = 0.0;  // detected-spectrum centroid; 0 when unknown
  double band_qe = 1.0;               // spectrum-weighted detector QE folded out of `values`
  bool dc_only = false;
  std::vector<std::string> warnings;
};

/// Uniform grid start, start+step, ... with `count` points.
inline std::vector<double> uniform_grid(double start, double step, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = start + static_cast<double>(i) * step;
  return g;
}

/// Step of a grid, or throws if the spacing is not uniform to 1e-6 relative.
inline double uniform_step(const std::vector<double>& grid) {
  if (grid.size() < 2) throw SamplingError("grid needs at least two points", 0.0);
  const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(step > 0.0)) throw SamplingError("grid must increase", 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs((grid[i] - grid[i - 1]) - step) > 1e-6 * step)
      throw SamplingError("displacement grid is not uniform", step);
  }
  return step;
}

}  // namespace cdisim
