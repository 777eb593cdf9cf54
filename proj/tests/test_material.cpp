#include <gtest/gtest.h>

#include <cmath>

#include "cdisim/material.hpp"
#include "cdisim/units.hpp"

using namespace cdisim;

namespace {

Material shipped() { return load_material(std::string(CDISIM_DATA_DIR) + "/slt_sellmeier.yaml"); }

}  // namespace

TEST(Material, ConstantModelIgnoresFrequencyAndTemperature) {
  const auto m = DispersionModel::constant(1.5);
  for (double nm : {400.0, 1064.0, 3000.0})
    for (double t : {-40.0, 25.0, 300.0}) EXPECT_EQ(refractive_index(m, omega_from_wavelength_nm(nm), t), 1.5);
}

TEST(Material, ShippedSellmeierMatchesHandEvaluation) {
  // Reference values from a separate scalar evaluation of the same coefficient set.
  const auto m = shipped();
  EXPECT_NEAR(refractive_index_at_wavelength(m.dispersion, 1.064, 25.0), 2.1336565642636875, 1e-13);
  EXPECT_NEAR(refractive_index_at_wavelength(m.dispersion, 0.532, 80.0), 2.2010590632684894, 1e-13);
  EXPECT_NEAR(refractive_index_at_wavelength(m.dispersion, 1.5, 120.0), 2.118583435961745, 1e-13);
}

TEST(Material, OmegaAndWavelengthEntryPointsAgree) {
  const auto m = shipped();
  const double by_omega = refractive_index(m.dispersion, omega_from_wavelength_nm(1064.0), 50.0);
  EXPECT_NEAR(by_omega, refractive_index_at_wavelength(m.dispersion, 1.064, 50.0), 1e-14);
}

TEST(Material, OutOfRangeQueriesRaiseRangeErrorWithBounds) {
  const auto m = shipped();
  try {
    refractive_index_at_wavelength(m.dispersion, 5.0, 25.0);
    FAIL() << "expected RangeError";
  } catch (const RangeError& e) {
    EXPECT_EQ(e.axis(), "wavelength_um");
    EXPECT_EQ(e.lo(), 0.39);
    EXPECT_EQ(e.hi(), 4.1);
  }
  EXPECT_THROW(refractive_index_at_wavelength(m.dispersion, 1.0, 500.0), RangeError);
  EXPECT_THROW(thermal_scale(m.expansion, 10.0), RangeError);
}

TEST(Material, IndexIsContinuousUnderRefinement) {
  const auto m = shipped();
  const double w = omega_from_wavelength_nm(1000.0);
  double previous = INFINITY;
  for (double delta = 1e12; delta > 1e6; delta /= 10.0) {
    const double diff =
        std::abs(refractive_index(m.dispersion, w + delta, 60.0) - refractive_index(m.dispersion, w, 60.0));
    EXPECT_LT(diff, previous + 1e-15);
    previous = diff;
  }
  EXPECT_LT(previous, 1e-8);
}

TEST(Material, TabulatedIsExactAtNodesAndBilinearBetween) {
  const auto m = DispersionModel::tabulated({0.5, 1.0, 2.0}, {20.0, 120.0}, {2.3, 2.2, 2.1, 2.31, 2.21, 2.11});
  EXPECT_EQ(refractive_index_at_wavelength(m, 1.0, 20.0), 2.2);
  EXPECT_EQ(refractive_index_at_wavelength(m, 2.0, 120.0), 2.11);
  EXPECT_NEAR(refractive_index_at_wavelength(m, 0.75, 70.0), 0.5 * (2.25 + 2.26), 1e-14);
  EXPECT_THROW(refractive_index_at_wavelength(m, 2.5, 70.0), RangeError);
}

TEST(Material, ThermalScaleExamples) {
  EXPECT_EQ(thermal_scale({1.6e-5, 7e-9, {}}, 25.0), 1.0);
  EXPECT_NEAR(thermal_scale({1.6e-5, 0.0, {}}, 125.0), 1.0016, 1e-15);
  EXPECT_EQ(thermal_scale({0.0, 0.0, {}}, 190.0), 1.0);
  EXPECT_NEAR(thermal_scale({1.6e-5, 7e-9, {}}, 80.0), 1.0 + 1.6e-5 * 55 + 7e-9 * 55 * 55, 1e-15);
}

TEST(Material, ThermalScaleIsOneAtReferenceForAnyCoefficients) {
  for (double a : {-1e-3, 0.0, 2e-5, 1.0})
    for (double b : {-1e-6, 0.0, 3e-8}) EXPECT_EQ(thermal_scale({a, b, {}}, 25.0), 1.0);
}

TEST(MaterialFile, ParsesTabulatedKind) {
  const auto m = parse_material(R"(
kind: tabulated
alpha: 1e-5
table:
  wavelengths_um: [0.4, 2.0]
  temperatures_c: [20, 100]
  n: [[2.2, 2.1], [2.21, 2.11]]
)");
  EXPECT_EQ(m.dispersion.kind, DispersionKind::tabulated);
  EXPECT_EQ(refractive_index_at_wavelength(m.dispersion, 2.0, 100.0), 2.11);
  EXPECT_EQ(m.expansion.alpha, 1e-5);
}

TEST(MaterialFile, RejectsUnknownKeysWithSuggestion) {
  try {
    parse_material("kind: constant\ncoefficients: {n: 1.5}\nalpah: 1e-5\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "alpah");
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
}

TEST(MaterialFile, SellmeierNeedsValidityRanges) {
  EXPECT_THROW(parse_material("kind: sellmeier-coefficient-set\ncoefficients: {A: 4.5}\n"), ConfigError);
}

TEST(MaterialFile, RejectsUnknownCoefficientNames) {
  EXPECT_THROW(parse_material("kind: sellmeier\ncoefficients: {A: 4.5, Q: 1}\nvalid_wavelength_um: [0.4, 4]\n"
                              "valid_temperature_c: [20, 200]\n"),
               ConfigError);
}
