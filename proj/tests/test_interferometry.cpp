#include <gtest/gtest.h>

#include <cmath>

#include "cdisim/interferometry.hpp"
#include "cdisim/sources.hpp"
#include "support/oracles.hpp"

using namespace cdisim;

namespace {

const QeCurve kFlat = QeCurve::flat(1.0, 200.0, 5000.0);

std::vector<double> fine_grid(double lo_nm, double hi_nm) { return omega_grid_from_wavelengths(lo_nm, hi_nm, 0.25); }

}  // namespace

TEST(Sample, PellicleReflectances) {
  const auto s = pellicle_response(1.5, 2.0);
  ASSERT_EQ(s.interfaces.size(), 2u);
  EXPECT_DOUBLE_EQ(s.interfaces[0].reflectance, -0.2);
  EXPECT_DOUBLE_EQ(s.interfaces[1].optical_depth_um, 3.0);
  EXPECT_DOUBLE_EQ(s.interfaces[1].reflectance, 0.2 * 0.96);
  EXPECT_THROW(pellicle_response(1.0, 2.0), DomainError);
  EXPECT_THROW(pellicle_response(1.5, 0.0), DomainError);
}

TEST(Sample, ValidationRejectsDisorderAndFlagsGain) {
  SampleResponse bad{{{5.0, 0.1}, {3.0, 0.1}}, {}};
  EXPECT_THROW(validate(bad), ConstructionError);
  SampleResponse loud{{{1.0, 0.9}, {2.0, 0.9}}, {}};
  validate(loud);
  EXPECT_EQ(loud.warnings.size(), 1u);
}

TEST(IdealInterferogram, MirrorFringeContrastAndPosition) {
  const auto src = gaussian_source(930.0, 70.0, fine_grid(750.0, 1150.0));
  const auto grid = uniform_grid(10.0, 0.01, 2001);
  const auto t = ideal_interferogram(src, kFlat, mirror_response(20.0), grid, 1.0);
  // I = R_ref + r² + 2√R_ref·r·g(x − d) with g(0) = 1.
  EXPECT_NEAR(t.values[1000], 4.0, 1e-9);
  EXPECT_NEAR(t.values.front(), 2.0, 1e-3);
  EXPECT_NEAR(t.band_qe, 1.0, 1e-12);
  const auto env = envelope(t);
  ASSERT_EQ(env.peaks.size(), 1u);
  EXPECT_NEAR(env.peaks[0].position_um, 20.0, 0.01);
}

TEST(IdealInterferogram, GaussianEnvelopeMatchesClosedForm) {
  for (const auto& [center, width] : {std::pair{930.0, 70.0}, std::pair{1064.0, 150.0}, std::pair{800.0, 40.0}}) {
    const auto src = gaussian_source(center, width, fine_grid(center - 4 * width, center + 4 * width));
    const auto grid = uniform_grid(-25.0, 0.02, 2501);
    const auto env = envelope(ideal_interferogram(src, kFlat, mirror_response(0.0), grid, 1.0));
    const double expected = oracle::gaussian_coherence_fwhm_um(center, width);
    EXPECT_NEAR(env.fwhm(), expected, 0.02 * expected) << center << "/" << width;
  }
}

TEST(IdealInterferogram, ReferenceAttenuationScalesFringeOnly) {
  const auto src = gaussian_source(930.0, 70.0, fine_grid(750.0, 1150.0));
  const auto grid = uniform_grid(-5.0, 0.01, 1001);
  const auto t = ideal_interferogram(src, kFlat, mirror_response(0.0, 0.2), grid, 0.04);
  EXPECT_NEAR(t.values[500], 0.04 + 0.04 + 2 * 0.2 * 0.2, 1e-9);
}

TEST(IdealInterferogram, DetectorWeightingShiftsCentroid) {
  const auto src = gaussian_source(930.0, 200.0, fine_grid(500.0, 1500.0));
  const auto falling = QeCurve::exponential_through(700.0, 0.5, 1200.0, 0.05, 700.0, 1500.0);
  const auto grid = uniform_grid(-2.0, 0.01, 401);
  const auto flat = ideal_interferogram(src, kFlat, mirror_response(0.0), grid);
  const auto tilted = ideal_interferogram(src, falling, mirror_response(0.0), grid);
  EXPECT_LT(tilted.center_wavelength_nm, flat.center_wavelength_nm);
  EXPECT_LT(tilted.band_qe, 0.5);
  EXPECT_GT(tilted.band_qe, 0.05);
}

TEST(IdealInterferogram, EmptySampleIsDcOnly) {
  const auto src = sld930_source(fine_grid(750.0, 1150.0));
  const auto t = ideal_interferogram(src, kFlat, SampleResponse{}, uniform_grid(0.0, 0.1, 50), 1.0);
  EXPECT_TRUE(t.dc_only);
  EXPECT_FALSE(t.warnings.empty());
  for (double v : t.values) EXPECT_EQ(v, 1.0);
  EXPECT_FALSE(envelope(t).fwhm_of_main_peak_um.has_value());
  EXPECT_THROW(envelope(t).fwhm(), UndefinedWidthError);
}

TEST(IdealInterferogram, DisjointDetectorIsAnError) {
  const auto src = sld930_source(fine_grid(750.0, 1150.0));
  const auto ir = QeCurve::flat(0.5, 1400.0, 1600.0);
  EXPECT_THROW(ideal_interferogram(src, ir, mirror_response(0.0), uniform_grid(0.0, 0.1, 10)), DomainError);
}

TEST(Envelope, RejectsUndersampledFringes) {
  const auto src = sld930_source(fine_grid(750.0, 1150.0));
  const auto coarse = ideal_interferogram(src, kFlat, mirror_response(5.0), uniform_grid(0.0, 0.2, 100));
  try {
    envelope(coarse);
    FAIL() << "expected SamplingError";
  } catch (const SamplingError& e) {
    EXPECT_GT(e.required_step_um(), 0.0);
    EXPECT_LT(e.required_step_um(), 0.2);
  }
  const auto fine = ideal_interferogram(src, kFlat, mirror_response(5.0), uniform_grid(0.0, 0.1, 200));
  EXPECT_NO_THROW(envelope(fine));
}

TEST(Envelope, PellicleResolvedOnlyByBroadSource) {
  const auto sample = pellicle_response(1.5, 2.0);
  const auto grid = uniform_grid(-10.0, 0.02, 1001);
  const auto broad = gaussian_source(1100.0, 500.0, fine_grid(600.0, 2400.0));
  const auto narrow = sld930_source(fine_grid(750.0, 1150.0));
  const auto a = envelope(ideal_interferogram(broad, kFlat, sample, grid));
  const auto b = envelope(ideal_interferogram(narrow, kFlat, sample, grid));
  ASSERT_EQ(a.peaks.size(), 2u);
  EXPECT_NEAR(a.peaks[1].position_um - a.peaks[0].position_um, 3.0, 0.15);
  EXPECT_EQ(a.half_max_support.size(), 2u);
  EXPECT_EQ(b.half_max_support.size(), 1u);
}

TEST(Envelope, SmoothingPreservesPeakPosition) {
  const auto src = sld930_source(fine_grid(750.0, 1150.0));
  const auto t = ideal_interferogram(src, kFlat, mirror_response(12.34), uniform_grid(0.0, 0.05, 501));
  const auto env = envelope(t, {0.0, 0.2, 0.3});
  EXPECT_NEAR(env.main_peak_um, 12.34, 0.02);
}

TEST(EstimateSpectrum, RecoversGaussianWidthAndCentre) {
  const auto src = gaussian_source(930.0, 70.0, fine_grid(700.0, 1200.0));
  const auto t = ideal_interferogram(src, kFlat, mirror_response(0.0), uniform_grid(-40.0, 0.05, 1601));
  const auto est = estimate_spectrum(t);
  EXPECT_TRUE(est.warnings.empty());
  const auto w = spectral_fwhm(est);
  const auto truth = spectral_fwhm(src);
  EXPECT_NEAR(w.center_nm, truth.center_nm, 0.5);
  EXPECT_NEAR(w.fwhm_nm, truth.fwhm_nm, 1.0);
}

TEST(EstimateSpectrum, ReproducesDetectedShapeInL2) {
  const auto wl = [] {
    std::vector<double> v;
    for (double l = 750.0; l <= 1200.0; l += 0.5) v.push_back(l);
    return v;
  }();
  const auto src = gaussian_source(1000.0, 120.0, fine_grid(600.0, 1600.0));
  const auto qe = QeCurve::exponential_through(900.0, 0.12, 1200.0, 0.05, 700.0, 1500.0);
  const auto t = ideal_interferogram(src, qe, mirror_response(0.0), uniform_grid(-30.0, 0.05, 1201));
  const auto est = estimate_spectrum(t, {wl, false, 8});
  std::vector<double> truth(wl.size());
  double top = 0.0;
  for (std::size_t i = 0; i < wl.size(); ++i) {
    const double u = (omega_from_wavelength_nm(wl[i]) - omega_from_wavelength_nm(1000.0)) /
                     (kTwoPi * kSpeedOfLightUmPerS * 0.12 / (1.0 * 1.0) / (2.0 * std::sqrt(2.0 * std::log(2.0))));
    truth[i] = std::exp(-0.5 * u * u) * qe(wl[i]);
    top = std::max(top, truth[i]);
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < wl.size(); ++i) {
    truth[i] /= top;
    if (truth[i] < 0.01) continue;
    num += (est.density[i] - truth[i]) * (est.density[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  EXPECT_LE(std::sqrt(num / den), 0.05);
}

TEST(EstimateSpectrum, ShortRecordWarnsAboutLeakage) {
  const auto src = gaussian_source(930.0, 10.0, fine_grid(850.0, 1010.0));
  const auto t = ideal_interferogram(src, kFlat, mirror_response(0.0), uniform_grid(-5.0, 0.05, 201));
  const auto est = estimate_spectrum(t);
  ASSERT_FALSE(est.warnings.empty());
  EXPECT_NE(est.warnings[0].find("leakage"), std::string::npos);
}
