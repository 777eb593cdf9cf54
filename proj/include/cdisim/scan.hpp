#pragma once

// A-scan and B-scan acquisition over sample phantoms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cdisim/detection.hpp"
#include "cdisim/errors.hpp"
#include "cdisim/interferogram.hpp"
#include "cdisim/interferometry.hpp"
#include "cdisim/parallel.hpp"
#include "cdisim/rng.hpp"
#include "cdisim/spectrum.hpp"

namespace cdisim {

struct ScanProtocol {
  double z_start_um = 0.0;
  double z_range_um = 70.0;
  double z_step_um = 0.1;
  double dwell_s = 0.5;
  double x_start_um = 0.0;
  double x_range_um = 800.0;
  double x_step_um = 5.0;
};

struct ProtocolShape {
  std::size_t rows = 0;     // z samples, inclusive of both ends
  std::size_t columns = 0;  // x positions
  std::vector<std::string> notices;
};

/// Validates the protocol and derives its grid sizes:
/// rows = floor(z_range/z_step) + 1, columns = floor(x_range/x_step).
inline ProtocolShape protocol_shape(const ScanProtocol& p) {
  if (!(p.z_step_um > 0.0) || !(p.x_step_um > 0.0)) throw DomainError("scan protocol: steps must be positive");
  if (!(p.dwell_s > 0.0)) throw DomainError("scan protocol: dwell must be positive");
  if (p.z_range_um < p.z_step_um || p.x_range_um < p.x_step_um)
    throw DomainError("scan protocol: ranges must be at least one step");
  ProtocolShape s;
  auto count = [&s](double range, double step, const char* axis) {
    const double ratio = range / step;
    const double whole = std::floor(ratio + 1e-9);
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
      s.notices.push_back(std::string("scan protocol: ") + axis + " range is not a multiple of the step; rounded down to " +
                          std::to_string(static_cast<long long>(whole)) + " steps");
    return static_cast<std::size_t>(whole);
  };
  s.rows = count(p.z_range_um, p.z_step_um, "z") + 1;
  s.columns = count(p.x_range_um, p.x_step_um, "x");
  return s;
}

inline std::vector<double> z_grid(const ScanProtocol& p) {
  return uniform_grid(p.z_start_um, p.z_step_um, protocol_shape(p).rows);
}

inline std::vector<double> x_positions(const ScanProtocol& p) {
  return uniform_grid(p.x_start_um, p.x_step_um, protocol_shape(p).columns);
}

/// Nominal acquisition time of one A-scan: points × dwell.
inline double a_scan_duration_s(const ScanProtocol& p) { return static_cast<double>(protocol_shape(p).rows) * p.dwell_s; }

/// Defaults: an attenuated reference arm matched to the membrane reflectance
/// and a flux giving roughly 2000 counts per dwell at an SPDC/SSPD fringe
/// peak, where shot-noise depth errors stay below 0.1 µm.
struct AcquisitionOptions {
  double flux_scale = 3.0e5;  // photons/s reaching the detector per unit ideal intensity
  double reference_reflectance = 0.04;
  EnvelopeOptions envelope{0.0, 0.2, 0.2};
};

struct AScan {
  Interferogram counts;
  EnvelopeResult envelope;
  double duration_s = 0.0;
  double peak_expected_counts = 0.0;  // largest Poisson mean over the scan
  std::vector<std::string> warnings;
};

/// One depth scan: ideal trace over the protocol's z grid, Poisson counts per
/// dwell window drawn from substreams (seed, scan_index, point), then its envelope.
inline AScan a_scan(const Spectrum& source, const DetectorModel& detector, const SampleResponse& sample,
                    const ScanProtocol& protocol, std::uint64_t seed, const AcquisitionOptions& options = {},
                    std::uint64_t scan_index = 0) {
  const auto shape = protocol_shape(protocol);
  const auto z = uniform_grid(protocol.z_start_um, protocol.z_step_um, shape.rows);
  const auto ideal = ideal_interferogram(source, detector.qe, sample, z, options.reference_reflectance);
  AScan a;
  a.counts = count_interferogram(ideal, detector, options.flux_scale, protocol.dwell_s, seed, scan_index);
  a.envelope = envelope(a.counts, options.envelope);
  a.duration_s = static_cast<double>(shape.rows) * protocol.dwell_s;
  const double top = *std::max_element(ideal.values.begin(), ideal.values.end());
  a.peak_expected_counts =
      (options.flux_scale * std::max(top, 0.0) * ideal.band_qe + detector.dark_rate) * protocol.dwell_s;
  a.warnings = shape.notices;
  a.warnings.insert(a.warnings.end(), sample.warnings.begin(), sample.warnings.end());
  a.warnings.insert(a.warnings.end(), a.counts.warnings.begin(), a.counts.warnings.end());
  return a;
}

struct SamplePhantom {
  std::string name;
  std::function<SampleResponse(double x_um)> response_at;
};

inline SamplePhantom mirror_phantom(double depth_um, double reflectance = 1.0) {
  return {"mirror", [=](double) { return mirror_response(depth_um, reflectance); }};
}

/// Same phantom with every interface moved deeper by `dz_um`.
inline SamplePhantom shifted_phantom(SamplePhantom base, double dz_um) {
  auto name = base.name + "+shift";
  return {std::move(name), [base = std::move(base), dz_um](double x) {
            auto r = base.response_at(x);
            for (auto& f : r.interfaces) f.optical_depth_um += dz_um;
            return r;
          }};
}

struct OnionCell {
  double depth_top_um = 0.0;
  double depth_bottom_um = 0.0;
  std::vector<std::pair<double, double>> x_extents_um;  // half-open [lo, hi) ranges
};

struct OnionOptions {
  double membrane_reflectance = 0.2;
  double undulation_um = 2.0;      // peak depth excursion of each cell across its extent
  double merge_tolerance_um = 1e-3;
  std::string name = "onion";
};

/// Layered-cell phantom. A cell covering x contributes a top and a bottom
/// membrane; both follow u·sin(π·(x − x_lo)/(x_hi − x_lo)) over the cell's
/// overall extent. Interfaces closer than the merge tolerance become one
/// interface with summed reflectance.
inline SamplePhantom onion_phantom(std::vector<OnionCell> cells, const OnionOptions& options = {}) {
  if (!(std::abs(options.membrane_reflectance) <= 1.0)) throw DomainError("onion: membrane reflectance must lie in [-1, 1]");
  struct Prepared {
    OnionCell cell;
    double lo, hi;
  };
  std::vector<Prepared> prepared;
  for (auto& c : cells) {
    if (!(c.depth_top_um < c.depth_bottom_um)) throw DomainError("onion: cell top must lie above its bottom");
    if (c.depth_top_um < 0.0) throw DomainError("onion: cell depths must be non-negative");
    if (c.x_extents_um.empty()) throw DomainError("onion: cell needs at least one x extent");
    double lo = c.x_extents_um.front().first, hi = c.x_extents_um.front().second;
    for (const auto& [a, b] : c.x_extents_um) {
      if (!(a < b)) throw DomainError("onion: x extents must have lo < hi");
      lo = std::min(lo, a);
      hi = std::max(hi, b);
    }
    prepared.push_back({std::move(c), lo, hi});
  }
  const double r = options.membrane_reflectance;
  const double u = options.undulation_um;
  const double tol = options.merge_tolerance_um;
  return {options.name, [prepared = std::move(prepared), r, u, tol](double x) {
            std::vector<double> depths;
            for (const auto& p : prepared) {
              const bool covered = std::any_of(p.cell.x_extents_um.begin(), p.cell.x_extents_um.end(),
                                               [x](const auto& e) { return x >= e.first && x < e.second; });
              if (!covered) continue;
              const double offset = u * std::sin(std::numbers::pi * (x - p.lo) / (p.hi - p.lo));
              depths.push_back(p.cell.depth_top_um + offset);
              depths.push_back(p.cell.depth_bottom_um + offset);
            }
            std::sort(depths.begin(), depths.end());
            SampleResponse s;
            for (const double d : depths) {
              if (!s.interfaces.empty() && d - s.interfaces.back().optical_depth_um <= tol) {
                auto& last = s.interfaces.back();
                last.reflectance = std::clamp(last.reflectance + r, -1.0, 1.0);
                s.warnings.push_back("onion: coincident membranes near " + std::to_string(last.optical_depth_um) +
                                     " um merged with summed reflectance");
                continue;
              }
              s.interfaces.push_back({std::max(d, 0.0), r});
            }
            validate(s);
            return s;
          }};
}

/// Three cells with axial sizes 30, 60 and 45 µm side by side across 0–800 µm.
inline std::vector<OnionCell> default_onion_cells() {
  return {
      {5.0, 35.0, {{0.0, 250.0}}},
      {4.0, 64.0, {{260.0, 530.0}}},
      {10.0, 55.0, {{540.0, 800.0}}},
  };
}

inline SamplePhantom default_onion_phantom() { return onion_phantom(default_onion_cells()); }

struct BScanColumn {
  std::vector<Peak> peaks;
  std::optional<double> fwhm_um;
  double peak_expected_counts = 0.0;
};

/// Stack of A-scans. `image` and `counts` are stored column-major: element
/// (x index i, z index j) lives at i·rows + j.
struct BScan {
  std::vector<double> x_positions_um;
  std::vector<double> z_grid_um;
  std::vector<double> image;   // envelope magnitude
  std::vector<double> counts;  // raw photon counts
  std::vector<BScanColumn> columns;
  ScanProtocol protocol;
  std::uint64_t seed = 0;
  std::string source_label;
  std::string detector_name;
  std::string phantom_name;
  double duration_s = 0.0;
  std::vector<std::string> warnings;

  std::size_t rows() const { return z_grid_um.size(); }
  std::size_t cols() const { return x_positions_um.size(); }
  double at(std::size_t ix, std::size_t iz) const { return image[ix * rows() + iz]; }
};

/// One A-scan per x position, run concurrently. Column i draws its counts from
/// substreams keyed by (seed, i), so the image does not depend on `threads`.
inline BScan b_scan(const Spectrum& source, const DetectorModel& detector, const SamplePhantom& phantom,
                    const ScanProtocol& protocol, std::uint64_t seed, const AcquisitionOptions& options = {},
                    unsigned threads = 1) {
  const auto shape = protocol_shape(protocol);
  BScan b;
  b.x_positions_um = uniform_grid(protocol.x_start_um, protocol.x_step_um, shape.columns);
  b.z_grid_um = uniform_grid(protocol.z_start_um, protocol.z_step_um, shape.rows);
  b.protocol = protocol;
  b.seed = seed;
  b.source_label = source.label;
  b.detector_name = detector.name;
  b.phantom_name = phantom.name;
  b.duration_s = static_cast<double>(shape.columns) * static_cast<double>(shape.rows) * protocol.dwell_s;
  b.image.assign(shape.columns * shape.rows, 0.0);
  b.counts.assign(shape.columns * shape.rows, 0.0);
  b.columns.resize(shape.columns);
  b.warnings = shape.notices;

  std::vector<std::vector<std::string>> column_warnings(shape.columns);
  const double z_lo = b.z_grid_um.front(), z_hi = b.z_grid_um.back();
  parallel_for(shape.columns, threads, [&](std::size_t i) {
    const auto sample = phantom.response_at(b.x_positions_um[i]);
    auto a = a_scan(source, detector, sample, protocol, seed, options, i);
    std::copy(a.envelope.envelope.begin(), a.envelope.envelope.end(), b.image.begin() + i * shape.rows);
    std::copy(a.counts.values.begin(), a.counts.values.end(), b.counts.begin() + i * shape.rows);
    b.columns[i] = {std::move(a.envelope.peaks), a.envelope.fwhm_of_main_peak_um, a.peak_expected_counts};
    auto& w = column_warnings[i];
    for (const auto& f : sample.interfaces)
      if (f.optical_depth_um < z_lo || f.optical_depth_um > z_hi)
        w.push_back("interface at " + std::to_string(f.optical_depth_um) + " um lies outside the z range");
    for (auto& msg : a.warnings)
      if (msg.rfind("sample has no interfaces", 0) != 0 && msg.rfind("scan protocol", 0) != 0) w.push_back(std::move(msg));
  });
  for (std::size_t i = 0; i < shape.columns; ++i)
    for (auto& msg : column_warnings[i]) b.warnings.push_back("column " + std::to_string(i) + ": " + msg);
  return b;
}

enum class SpotConvention { lambda_f_over_d, gaussian_4_over_pi };

/// Focused spot size in µm from collimated beam diameter D (mm), focal length
/// f (mm) and wavelength (nm): λf/D, or (4/π)·λf/D for the Gaussian-waist
/// convention. The default λf/D gives 10.6 µm at D = 2.5 mm, f = 25 mm, 1064 nm.
inline double transverse_resolution_estimate(double beam_diameter_mm, double focal_length_mm, double wavelength_nm,
                                             SpotConvention convention = SpotConvention::lambda_f_over_d) {
  if (!(beam_diameter_mm > 0.0) || !(focal_length_mm > 0.0) || !(wavelength_nm > 0.0))
    throw DomainError("transverse_resolution_estimate: inputs must be positive");
  const double spot = wavelength_nm * 1e-3 * focal_length_mm / beam_diameter_mm;
  return convention == SpotConvention::gaussian_4_over_pi ? 4.0 / std::numbers::pi * spot : spot;
}

}  // namespace cdisim
