#pragma once

// Inverse design: find chirp parameters (b1, ζ) whose SPDC spectrum has a
// requested centre wavelength and bandwidth. A coarse grid scan seeds a
// Nelder–Mead simplex refinement.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "cdisim/errors.hpp"
#include "cdisim/grating.hpp"
#include "cdisim/parallel.hpp"
#include "cdisim/qpm.hpp"
#include "cdisim/spectrum.hpp"

namespace cdisim {

struct NelderMeadOptions {
  int max_evaluations = 200;
  double x_tolerance = 1e-6;  // simplex diameter (max-norm) at which to stop
  double f_tolerance = 0.0;   // stop once the best value is at or below this
  double initial_step = 0.1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

/// Standard Nelder–Mead (reflection 1, expansion 2, contraction ½, shrink ½).
inline NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> start,
                                    const NelderMeadOptions& options = {}) {
  const std::size_t n = start.size();
  NelderMeadResult result;
  if (n == 0) {
    result.value = f(start);
    result.evaluations = 1;
    return result;
  }
  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(n + 1);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    // Past the budget, trial points count as infinitely bad and are never kept.
    if (evals >= options.max_evaluations) return std::numeric_limits<double>::infinity();
    ++evals;
    return f(x);
  };
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s2(n + 1);
    std::vector<double> v2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      s2[i] = simplex[order[i]];
      v2[i] = values[order[i]];
    }
    simplex.swap(s2);
    values.swap(v2);
  };
  auto along = [&](const std::vector<double>& from, const std::vector<double>& to, double t) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = from[i] + t * (to[i] - from[i]);
    return p;
  };

  while (true) {
    sort_simplex();
    double diameter = 0.0;
    for (std::size_t v = 1; v <= n; ++v)
      for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::abs(simplex[v][i] - simplex[0][i]));
    if (evals >= options.max_evaluations || diameter <= options.x_tolerance || values[0] <= options.f_tolerance) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v][i] / static_cast<double>(n);

    const auto reflected = along(centroid, simplex[n], -1.0);
    const double fr = eval(reflected);
    if (fr < values[0]) {
      const auto expanded = along(centroid, simplex[n], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        values[n] = fe;
      } else {
        simplex[n] = reflected;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = fr;
    } else {
      const bool outside = fr < values[n];
      const auto contracted = outside ? along(centroid, reflected, 0.5) : along(centroid, simplex[n], 0.5);
      const double fc = eval(contracted);
      if (fc < (outside ? fr : values[n])) {
        simplex[n] = contracted;
        values[n] = fc;
      } else {
        for (std::size_t v = 1; v <= n; ++v) {
          simplex[v] = along(simplex[0], simplex[v], 0.5);
          values[v] = eval(simplex[v]);
        }
      }
    }
  }
  result.x = simplex[0];
  result.value = values[0];
  result.evaluations = evals;
  return result;
}

struct DesignObjective {
  double target_center_nm = 1064.0;
  double target_fwhm_nm = 300.0;
  double temperature_c = 80.0;
  double center_weight = 1.0;  // per nm²
  double fwhm_weight = 1.0;    // per nm²
};

struct DesignBounds {
  double b1_min_um = 7.0;
  double b1_max_um = 8.5;
  double zeta_min_per_um = 0.0;
  double zeta_max_per_um = 8e-6;
  int n_periods = 2515;
};

struct DesignOptions {
  std::vector<double> omega_grid;  // empty: 700–1500 nm at 0.5 nm
  int grid_points = 7;             // per searched axis
  NelderMeadOptions refine{150, 1e-5, 0.0, 0.0};
  unsigned threads = 1;
};

struct SpectralMetrics {
  double center_nm = 0.0;
  double fwhm_nm = 0.0;
};

struct DesignResult {
  GratingSpec spec;
  SpectralMetrics achieved;
  double objective = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int feasible_grid_points = 0;
};

/// Centre (midpoint of the half-maximum crossings) and FWHM, both in nm, of
/// the highest spectral peak.
inline SpectralMetrics spectral_metrics(const Spectrum& s) {
  const auto w = spectral_fwhm(s);
  return {w.center_nm, w.fwhm_nm};
}

inline DesignResult design_search(const Material& material, const PumpConfig& pump, const DesignObjective& objective,
                                  const DesignBounds& bounds, const DesignOptions& options = {}) {
  if (!(bounds.b1_min_um > 0.0) || bounds.b1_max_um < bounds.b1_min_um ||
      bounds.zeta_max_per_um < bounds.zeta_min_per_um || bounds.n_periods < 1)
    throw InfeasibleError("design_search: empty or invalid bounds");
  const auto omega = options.omega_grid.empty() ? omega_grid_from_wavelengths(700.0, 1500.0, 0.5) : options.omega_grid;

  const bool search_b1 = bounds.b1_max_um > bounds.b1_min_um;
  const bool search_zeta = bounds.zeta_max_per_um > bounds.zeta_min_per_um;
  const std::size_t dims = static_cast<std::size_t>(search_b1) + static_cast<std::size_t>(search_zeta);

  auto to_spec = [&](std::span<const double> u, GratingSpec& spec) {
    std::size_t k = 0;
    const double ub = search_b1 ? std::clamp(u[k++], 0.0, 1.0) : 0.0;
    const double uz = search_zeta ? std::clamp(u[k++], 0.0, 1.0) : 0.0;
    spec.b1_um = bounds.b1_min_um + ub * (bounds.b1_max_um - bounds.b1_min_um);
    spec.zeta_per_um = bounds.zeta_min_per_um + uz * (bounds.zeta_max_per_um - bounds.zeta_min_per_um);
    spec.n_periods = bounds.n_periods;
    spec.expansion = material.expansion;
    return 1.0 / spec.b1_um - (spec.n_periods - 1) * spec.zeta_per_um > 0.0;
  };
  auto evaluate = [&](std::span<const double> u, SpectralMetrics* metrics) {
    GratingSpec spec;
    if (!to_spec(u, spec)) return std::numeric_limits<double>::infinity();
    try {
      const auto s = spdc_spectrum(material.dispersion, pump, spec, omega, objective.temperature_c);
      const auto m = spectral_metrics(s);
      if (metrics) *metrics = m;
      const double dc = m.center_nm - objective.target_center_nm;
      const double df = m.fwhm_nm - objective.target_fwhm_nm;
      return objective.center_weight * dc * dc + objective.fwhm_weight * df * df;
    } catch (const UndefinedWidthError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Coarse scan.
  const int per_axis = std::max(2, options.grid_points);
  std::size_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) total *= static_cast<std::size_t>(per_axis);
  std::vector<std::vector<double>> points(total, std::vector<double>(dims));
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rem = p;
    for (std::size_t d = 0; d < dims; ++d) {
      points[p][d] = static_cast<double>(rem % per_axis) / (per_axis - 1);
      rem /= per_axis;
    }
  }
  std::vector<double> values(total);
  std::vector<char> feasible(total);
  parallel_for(total, options.threads, [&](std::size_t p) {
    GratingSpec spec;
    feasible[p] = to_spec(points[p], spec);
    values[p] = feasible[p] ? evaluate(points[p], nullptr) : std::numeric_limits<double>::infinity();
  });
  DesignResult result;
  result.feasible_grid_points = static_cast<int>(std::count(feasible.begin(), feasible.end(), 1));
  if (result.feasible_grid_points == 0)
    throw InfeasibleError("design_search: no grating in the bounds has all periods positive");
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());

  auto refine_options = options.refine;
  if (refine_options.initial_step <= 0.0) refine_options.initial_step = 0.5 / (per_axis - 1);
  int refine_evals = 0;
  std::vector<double> u_best = points[best];
  double f_best = values[best];
  if (dims > 0 && std::isfinite(f_best)) {
    const auto nm = nelder_mead([&](std::span<const double> u) { return evaluate(u, nullptr); }, points[best],
                                refine_options);
    refine_evals = nm.evaluations;
    if (nm.value < f_best) {
      u_best = nm.x;
      f_best = nm.value;
    }
  }
  for (auto& v : u_best) v = std::clamp(v, 0.0, 1.0);
  to_spec(u_best, result.spec);
  result.objective = evaluate(u_best, &result.achieved);
  result.evaluations = static_cast<int>(total) + refine_evals + 1;
  if (!std::isfinite(result.objective)) throw InfeasibleError("design_search: no grating produced a measurable spectrum");
  return result;
}

}  // namespace cdisim
