#pragma once

// Linearly chirped periodically poled structures: period recursion,
// starting positions, and the realized ±1 segment layout d(z).

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdisim/errors.hpp"
#include "cdisim/material.hpp"

namespace cdisim {

/// Generative parameters of a chirped grating at the 25 °C reference.
struct GratingSpec {
  double b1_um = 0.0;        // first period length
  double zeta_per_um = 0.0;  // chirp of the spatial frequency 1/b_k per period
  int n_periods = 0;
  ThermalExpansion expansion{};
};

/// Throws ConstructionError unless b1 > 0, N >= 1 and every period is positive.
inline void validate(const GratingSpec& spec) {
  if (!(spec.b1_um > 0.0)) throw ConstructionError("grating: b1_um must be positive");
  if (spec.n_periods < 1) throw ConstructionError("grating: n_periods must be at least 1");
  if (!std::isfinite(spec.zeta_per_um)) throw ConstructionError("grating: zeta_per_um must be finite");
  const double last_frequency = 1.0 / spec.b1_um - (spec.n_periods - 1) * spec.zeta_per_um;
  if (!(last_frequency > 0.0)) {
    // first k with 1/b1 - (k-1)ζ <= 0
    const auto k = static_cast<long long>(std::ceil(1.0 / (spec.b1_um * spec.zeta_per_um))) + 1;
    throw ConstructionError("grating: period " + std::to_string(k) +
                            " is non-positive (1/b1 - (N-1)*zeta must stay > 0)");
  }
}

inline GratingSpec make_grating_spec(double b1_um, double zeta_per_um, int n_periods, ThermalExpansion expansion = {}) {
  GratingSpec spec{b1_um, zeta_per_um, n_periods, expansion};
  validate(spec);
  return spec;
}

/// Named structures: `unchirped`, `medium`, `max`.
struct GratingPreset {
  std::string_view name;
  double b1_um;
  double zeta_per_um;
  int n_periods;
};

inline constexpr GratingPreset kGratingPresets[] = {
    {"unchirped", 7.95, 0.0, 2515},
    {"medium", 7.85, 1.26e-6, 2515},
    {"max", 7.5, 6.24e-6, 2515},
};

inline GratingSpec grating_preset(std::string_view name, ThermalExpansion expansion = {}) {
  for (const auto& p : kGratingPresets)
    if (p.name == name) return make_grating_spec(p.b1_um, p.zeta_per_um, p.n_periods, expansion);
  throw ConfigError("grating", 0, "unknown grating preset '" + std::string(name) + "' (expected unchirped, medium, max)");
}

/// b_k(T) for k = 1..N: 1/b_k = 1/b1 − (k−1)ζ at 25 °C, then dilated by thermal_scale(T).
inline std::vector<double> period_lengths(const GratingSpec& spec, double temperature_c) {
  validate(spec);
  const double scale = thermal_scale(spec.expansion, temperature_c);
  const double inv_b1 = 1.0 / spec.b1_um;
  std::vector<double> lengths(static_cast<std::size_t>(spec.n_periods));
  for (int k = 0; k < spec.n_periods; ++k) {
    const double inv = k == 0 ? inv_b1 : inv_b1 - k * spec.zeta_per_um;
    const double b = (k == 0 ? spec.b1_um : 1.0 / inv) * scale;
    if (!(b > 0.0) || !std::isfinite(b))
      throw ConstructionError("grating: period " + std::to_string(k + 1) + " is non-positive");
    lengths[static_cast<std::size_t>(k)] = b;
  }
  return lengths;
}

/// a_1 = 0, a_k = a_{k−1} + b_{k−1}, accumulated with Neumaier compensation.
inline std::vector<double> starting_positions(std::span<const double> lengths) {
  std::vector<double> starts(lengths.size());
  double sum = 0.0, comp = 0.0;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    starts[k] = sum + comp;
    const double t = sum + lengths[k];
    comp += std::abs(sum) >= std::abs(lengths[k]) ? (sum - t) + lengths[k] : (lengths[k] - t) + sum;
    sum = t;
  }
  return starts;
}

struct Segment {
  double start_um;
  double width_um;
  int sign;  // +1 or −1
};

/// The realized poling profile at one temperature. Immutable once built.
struct GratingRealization {
  std::vector<Segment> segments;
  double total_length_um = 0.0;
  double temperature_c = 25.0;
};

namespace detail {

inline GratingRealization realize_lengths(std::span<const double> lengths, double temperature_c) {
  GratingRealization g;
  g.temperature_c = temperature_c;
  g.segments.reserve(2 * lengths.size());
  // Half-periods are accumulated as one compensated sequence so that the
  // total equals the correctly rounded sum of all widths.
  std::vector<double> halves;
  halves.reserve(2 * lengths.size());
  for (double b : lengths) {
    halves.push_back(0.5 * b);
    halves.push_back(0.5 * b);
  }
  const auto starts = starting_positions(halves);
  for (std::size_t i = 0; i < halves.size(); ++i)
    g.segments.push_back({starts[i], halves[i], i % 2 == 0 ? +1 : -1});
  if (!halves.empty()) {
    std::vector<double> with_end(halves.begin(), halves.end());
    with_end.push_back(0.0);
    g.total_length_um = starting_positions(with_end).back();
  }
  return g;
}

}  // namespace detail

/// 2N alternating +1/−1 segments, each half of its period (50 % duty cycle).
inline GratingRealization realize(const GratingSpec& spec, double temperature_c) {
  const auto lengths = period_lengths(spec, temperature_c);
  return detail::realize_lengths(lengths, temperature_c);
}

}  // namespace cdisim
