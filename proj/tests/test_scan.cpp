#include <gtest/gtest.h>

#include <cmath>

#include "cdisim/qpm.hpp"
#include "cdisim/scan.hpp"
#include "cdisim/sources.hpp"

using namespace cdisim;

namespace {

const Spectrum& spdc_max80() {
  static const Spectrum s = [] {
    const auto m = load_material(std::string(CDISIM_DATA_DIR) + "/slt_sellmeier.yaml");
    return spdc_spectrum(m.dispersion, PumpConfig{}, grating_preset("max", m.expansion),
                         omega_grid_from_wavelengths(700.0, 1500.0, 0.5), 80.0, Normalization::peak_one);
  }();
  return s;
}

const DetectorModel kSspd = detector_preset("sspd");

}  // namespace

TEST(Protocol, DefaultShapeAndDuration) {
  const ScanProtocol p;
  const auto shape = protocol_shape(p);
  EXPECT_EQ(shape.rows, 701u);
  EXPECT_EQ(shape.columns, 160u);
  EXPECT_TRUE(shape.notices.empty());
  EXPECT_DOUBLE_EQ(a_scan_duration_s(p), 350.5);
  EXPECT_DOUBLE_EQ(z_grid(p).back(), 70.0);
  EXPECT_DOUBLE_EQ(x_positions(p).back(), 795.0);
}

TEST(Protocol, NonDivisibleRangeRoundsDownWithNotice) {
  ScanProtocol p;
  p.z_range_um = 70.05;
  const auto shape = protocol_shape(p);
  EXPECT_EQ(shape.rows, 701u);
  ASSERT_EQ(shape.notices.size(), 1u);
  p.z_step_um = 0.0;
  EXPECT_THROW(protocol_shape(p), DomainError);
}

TEST(AScan, MirrorPeakAtItsDepth) {
  const auto a = a_scan(spdc_max80(), kSspd, mirror_response(35.0, 0.2), ScanProtocol{}, 1234);
  ASSERT_EQ(a.counts.values.size(), 701u);
  EXPECT_DOUBLE_EQ(a.duration_s, 350.5);
  EXPECT_NEAR(a.envelope.main_peak_um, 35.0, 0.1);
  EXPECT_GE(a.peak_expected_counts, 100.0);
  EXPECT_LT(a.envelope.fwhm(), 2.0);
}

TEST(AScan, ZeroFluxHasNoWidth) {
  AcquisitionOptions o;
  o.flux_scale = 0.0;
  const auto a = a_scan(spdc_max80(), detector_preset("ideal"), mirror_response(35.0), ScanProtocol{}, 1, o);
  for (double v : a.counts.values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(a.envelope.fwhm(), UndefinedWidthError);
}

TEST(AScan, TranslatingTheSampleTranslatesThePeak) {
  const auto base = mirror_phantom(30.0, 0.2);
  const auto moved = shifted_phantom(base, 4.0);
  const auto a = a_scan(spdc_max80(), kSspd, base.response_at(0.0), ScanProtocol{}, 77);
  const auto b = a_scan(spdc_max80(), kSspd, moved.response_at(0.0), ScanProtocol{}, 77);
  EXPECT_NEAR(b.envelope.main_peak_um - a.envelope.main_peak_um, 4.0, 0.2);
}

TEST(Onion, FlatCellGivesTwoInterfacesAndPeaks) {
  OnionOptions o;
  o.undulation_um = 0.0;
  const auto phantom = onion_phantom({{10.0, 40.0, {{0.0, 100.0}}}}, o);
  const auto s = phantom.response_at(50.0);
  ASSERT_EQ(s.interfaces.size(), 2u);
  EXPECT_EQ(s.interfaces[0].optical_depth_um, 10.0);
  EXPECT_EQ(s.interfaces[1].optical_depth_um, 40.0);
  const auto a = a_scan(spdc_max80(), kSspd, s, ScanProtocol{}, 5);
  ASSERT_EQ(a.envelope.peaks.size(), 2u);
  EXPECT_NEAR(a.envelope.peaks[0].position_um, 10.0, 0.1);
  EXPECT_NEAR(a.envelope.peaks[1].position_um, 40.0, 0.1);
}

TEST(Onion, OutsideEveryCellIsEmpty) {
  const auto phantom = onion_phantom({{10.0, 40.0, {{0.0, 100.0}}}});
  const auto s = phantom.response_at(150.0);
  EXPECT_TRUE(s.interfaces.empty());
  const auto a = a_scan(spdc_max80(), kSspd, s, ScanProtocol{}, 5);
  EXPECT_TRUE(a.counts.dc_only);
}

TEST(Onion, CoincidentMembranesMergeWithWarning) {
  OnionOptions o;
  o.undulation_um = 0.0;
  const auto phantom = onion_phantom({{10.0, 20.0, {{0.0, 100.0}}}, {20.0, 30.0, {{0.0, 100.0}}}}, o);
  const auto s = phantom.response_at(10.0);
  ASSERT_EQ(s.interfaces.size(), 3u);
  EXPECT_NEAR(s.interfaces[1].reflectance, 0.4, 1e-15);
  EXPECT_FALSE(s.warnings.empty());
}

TEST(Onion, UndulationMovesBothMembranesTogether) {
  const auto phantom = default_onion_phantom();
  for (double x : {20.0, 125.0, 300.0, 600.0}) {
    const auto s = phantom.response_at(x);
    ASSERT_EQ(s.interfaces.size(), 2u);
    const double size = s.interfaces[1].optical_depth_um - s.interfaces[0].optical_depth_um;
    EXPECT_TRUE(std::abs(size - 30.0) < 1e-9 || std::abs(size - 60.0) < 1e-9 || std::abs(size - 45.0) < 1e-9) << x;
  }
  EXPECT_TRUE(phantom.response_at(255.0).interfaces.empty());
}

TEST(Onion, DefaultCellSizesRecoveredWithinTwoPixels) {
  const auto phantom = default_onion_phantom();
  const std::pair<double, double> centres[] = {{125.0, 30.0}, {395.0, 60.0}, {670.0, 45.0}};
  for (const auto& [x, size] : centres) {
    const auto a = a_scan(spdc_max80(), kSspd, phantom.response_at(x), ScanProtocol{}, 42);
    ASSERT_EQ(a.envelope.peaks.size(), 2u) << x;
    EXPECT_NEAR(a.envelope.peaks[1].position_um - a.envelope.peaks[0].position_um, size, 0.2) << x;
  }
}

TEST(BScan, ImageIndependentOfWorkerCount) {
  ScanProtocol p;
  p.x_range_um = 20.0;
  const auto phantom = default_onion_phantom();
  const auto a = b_scan(spdc_max80(), kSspd, phantom, p, 9, {}, 1);
  const auto b = b_scan(spdc_max80(), kSspd, phantom, p, 9, {}, 3);
  EXPECT_EQ(a.cols(), 4u);
  EXPECT_EQ(a.rows(), 701u);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.at(2, 100), a.image[2 * 701 + 100]);
}

TEST(BScan, WarnsWhenInterfacesLeaveTheDepthRange) {
  ScanProtocol p;
  p.x_range_um = 10.0;
  const auto b = b_scan(spdc_max80(), kSspd, mirror_phantom(90.0, 0.2), p, 1);
  ASSERT_EQ(b.warnings.size(), 2u);
  EXPECT_NE(b.warnings[0].find("outside the z range"), std::string::npos);
}

TEST(Transverse, SpotSizeConventions) {
  EXPECT_NEAR(transverse_resolution_estimate(2.5, 25.0, 1064.0), 10.64, 1e-12);
  EXPECT_NEAR(transverse_resolution_estimate(2.5, 25.0, 1064.0, SpotConvention::gaussian_4_over_pi),
              4.0 / M_PI * 10.64, 1e-12);
  EXPECT_NEAR(transverse_resolution_estimate(5.0, 25.0, 1064.0), 5.32, 1e-12);
  EXPECT_NEAR(transverse_resolution_estimate(2.5, 50.0, 1064.0), 21.28, 1e-12);
  EXPECT_THROW(transverse_resolution_estimate(0.0, 25.0, 1064.0), DomainError);
}
