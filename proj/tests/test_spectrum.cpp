#include <gtest/gtest.h>

#include <cmath>

#include "cdisim/spectrum.hpp"
#include "cdisim/units.hpp"

using namespace cdisim;

namespace {

Spectrum on_grid(std::vector<double> x, std::vector<double> y) {
  Spectrum s;
  s.omega_grid = std::move(x);
  s.density = std::move(y);
  return s;
}

}  // namespace

TEST(SpectralWidth, TriangleHasHalfItsBase) {
  std::vector<double> x, y;
  for (int i = 0; i <= 200; ++i) {
    x.push_back(1e15 + i * 1e12);
    y.push_back(std::max(0.0, 1.0 - std::abs(i - 100) / 40.0));  // base 80 steps
  }
  const auto w = spectral_fwhm(on_grid(x, y));
  EXPECT_NEAR(w.fwhm_omega, 40e12, 1e-3);
  EXPECT_NEAR(w.center_omega, 1e15 + 100e12, 1e-3);
  EXPECT_FALSE(w.multimodal);
}

TEST(SpectralWidth, DiscreteGaussianWithinHalfAStep) {
  const double sigma = 7.3e12, step = 1e12, center = 2e15;
  std::vector<double> x, y;
  for (int i = -100; i <= 100; ++i) {
    x.push_back(center + i * step + 0.37 * step);
    const double u = (x.back() - center) / sigma;
    y.push_back(std::exp(-0.5 * u * u));
  }
  const auto w = spectral_fwhm(on_grid(x, y));
  EXPECT_NEAR(w.fwhm_omega, 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma, 0.5 * step);
}

TEST(SpectralWidth, TwoEqualPeaksReportOnePeakAndFlag) {
  std::vector<double> x, y;
  for (int i = 0; i < 400; ++i) {
    x.push_back(1e15 + i * 1e12);
    const double a = (i - 100) / 10.0, b = (i - 300) / 10.0;
    y.push_back(std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b));
  }
  const auto w = spectral_fwhm(on_grid(x, y));
  EXPECT_TRUE(w.multimodal);
  EXPECT_EQ(w.interval_count, 2u);
  EXPECT_NEAR(w.fwhm_omega, 2.0 * std::sqrt(2.0 * std::log(2.0)) * 10e12, 1e12);
}

TEST(SpectralWidth, ZeroSpectrumHasNoWidth) {
  EXPECT_THROW(spectral_fwhm(on_grid({1.0, 2.0, 3.0}, {0.0, 0.0, 0.0})), UndefinedWidthError);
}

TEST(Spectrum, ValidationRejectsBadInput) {
  EXPECT_THROW(validate(on_grid({}, {})), ConstructionError);
  EXPECT_THROW(validate(on_grid({1.0, 2.0}, {1.0})), ConstructionError);
  EXPECT_THROW(validate(on_grid({1.0, 1.0}, {1.0, 1.0})), ConstructionError);
  EXPECT_THROW(validate(on_grid({1.0, 2.0}, {1.0, -1.0})), ConstructionError);
}

TEST(Spectrum, Normalizations) {
  auto s = on_grid({1.0, 2.0, 3.0}, {1.0, 4.0, 1.0});
  normalize(s, Normalization::peak_one);
  EXPECT_EQ(*std::max_element(s.density.begin(), s.density.end()), 1.0);
  normalize(s, Normalization::unit_area);
  const auto w = trapezoid_weights(s.omega_grid);
  double area = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) area += w[i] * s.density[i];
  EXPECT_NEAR(area, 1.0, 1e-15);
}

TEST(Spectrum, WavelengthGridRoundTrips) {
  const auto grid = omega_grid_from_wavelengths(700.0, 1500.0, 0.5);
  ASSERT_EQ(grid.size(), 1601u);
  Spectrum s = on_grid(grid, std::vector<double>(grid.size(), 1.0));
  const auto wl = s.wavelengths_nm();
  EXPECT_NEAR(wl.front(), 700.0, 1e-10);
  EXPECT_NEAR(wl.back(), 1500.0, 1e-10);
  EXPECT_NEAR(wl[1] - wl[0], 0.5, 1e-10);
}

TEST(Spectrum, ResampleLinearHandlesDescendingInput) {
  const std::vector<double> x = {3.0, 2.0, 1.0}, y = {30.0, 20.0, 10.0}, q = {0.5, 1.5, 2.5, 3.5};
  const auto r = resample_linear(x, y, q, -1.0);
  EXPECT_EQ(r[0], -1.0);
  EXPECT_DOUBLE_EQ(r[1], 15.0);
  EXPECT_DOUBLE_EQ(r[2], 25.0);
  EXPECT_EQ(r[3], -1.0);
}
