#include <gtest/gtest.h>

#include <cmath>

#include "cdisim/design.hpp"

using namespace cdisim;

namespace {

Material shipped() { return load_material(std::string(CDISIM_DATA_DIR) + "/slt_sellmeier.yaml"); }

}  // namespace

TEST(NelderMead, FindsQuadraticMinimum) {
  const auto f = [](std::span<const double> x) {
    return (x[0] - 0.3) * (x[0] - 0.3) + 4.0 * (x[1] + 0.2) * (x[1] + 0.2) + 1.5;
  };
  const auto r = nelder_mead(f, {0.0, 0.0}, {500, 1e-9, 0.0, 0.1});
  EXPECT_NEAR(r.x[0], 0.3, 1e-6);
  EXPECT_NEAR(r.x[1], -0.2, 1e-6);
  EXPECT_NEAR(r.value, 1.5, 1e-10);
  EXPECT_LE(r.evaluations, 500);
}

TEST(NelderMead, RespectsEvaluationBudget) {
  const auto f = [](std::span<const double> x) { return std::cos(10 * x[0]) + x[0] * x[0]; };
  const auto r = nelder_mead(f, {2.0}, {12, 0.0, -INFINITY, 0.5});
  EXPECT_LE(r.evaluations, 12);
}

TEST(DesignSearch, InvalidOrInfeasibleBounds) {
  const auto m = shipped();
  EXPECT_THROW(design_search(m, PumpConfig{}, {}, {8.0, 7.0, 0.0, 1e-6, 2515}), InfeasibleError);
  // Every grating in this box has a non-positive final period.
  EXPECT_THROW(design_search(m, PumpConfig{}, {}, {7.0, 8.0, 2e-4, 3e-4, 2515}), InfeasibleError);
}

TEST(DesignSearch, OneDimensionalUnchirpedSearch) {
  const auto m = shipped();
  DesignObjective objective;
  objective.temperature_c = 120.0;
  DesignOptions options;
  options.omega_grid = omega_grid_from_wavelengths(650.0, 1600.0, 1.0);
  options.grid_points = 5;
  options.refine.max_evaluations = 30;
  const auto r = design_search(m, PumpConfig{}, objective, {7.8, 8.0, 0.0, 0.0, 2515}, options);
  EXPECT_EQ(r.spec.zeta_per_um, 0.0);
  EXPECT_GE(r.spec.b1_um, 7.8);
  EXPECT_LE(r.spec.b1_um, 8.0);
  EXPECT_TRUE(std::isfinite(r.objective));
  EXPECT_EQ(r.feasible_grid_points, 5);
}

TEST(DesignSearch, FixedPointNeedsNoSearch) {
  const auto m = shipped();
  DesignOptions options;
  options.omega_grid = omega_grid_from_wavelengths(650.0, 1600.0, 1.0);
  const auto r = design_search(m, PumpConfig{}, {}, {7.5, 7.5, 6.24e-6, 6.24e-6, 2515}, options);
  EXPECT_EQ(r.spec.b1_um, 7.5);
  EXPECT_EQ(r.spec.zeta_per_um, 6.24e-6);
  EXPECT_GT(r.achieved.fwhm_nm, 300.0);
}
