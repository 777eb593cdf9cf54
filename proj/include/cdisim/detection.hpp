#pragma once

// Photon-counting detector models: wavelength-dependent quantum efficiency,
// dark counts, and Poisson sampling of count records.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cdisim/errors.hpp"
#include "cdisim/interferogram.hpp"
#include "cdisim/parallel.hpp"
#include "cdisim/rng.hpp"
#include "cdisim/spectrum.hpp"
#include "cdisim/units.hpp"

namespace cdisim {

enum class QeKind { flat, exponential_decay, tabulated };

/// Quantum efficiency η(λ); zero outside [support_lo_nm, support_hi_nm].
struct QeCurve {
  QeKind kind = QeKind::flat;
  double qe0 = 1.0;             // flat level, or η at reference_nm
  double reference_nm = 0.0;    // exponential_decay
  double decay_nm = 0.0;        // exponential_decay: η = qe0·exp(−(λ − reference)/decay)
  std::vector<double> table_nm;  // tabulated nodes, linear in between
  std::vector<double> table_qe;
  double support_lo_nm = 0.0;
  double support_hi_nm = 0.0;

  double operator()(double wavelength_nm) const {
    if (wavelength_nm < support_lo_nm || wavelength_nm > support_hi_nm) return 0.0;
    double v = 0.0;
    switch (kind) {
      case QeKind::flat:
        v = qe0;
        break;
      case QeKind::exponential_decay:
        v = qe0 * std::exp(-(wavelength_nm - reference_nm) / decay_nm);
        break;
      case QeKind::tabulated:
        v = resample_linear(table_nm, table_qe, std::span<const double>(&wavelength_nm, 1), 0.0)[0];
        break;
    }
    return std::clamp(v, 0.0, 1.0);
  }

  double at_omega(double omega) const { return (*this)(wavelength_nm_from_omega(omega)); }

  static QeCurve flat(double qe, double lo_nm, double hi_nm) {
    if (!(qe >= 0.0 && qe <= 1.0)) throw ConstructionError("QE must lie in [0, 1]");
    QeCurve c;
    c.kind = QeKind::flat;
    c.qe0 = qe;
    c.support_lo_nm = lo_nm;
    c.support_hi_nm = hi_nm;
    return c;
  }

  /// Exponential decay through (nm_a, qe_a) and (nm_b, qe_b).
  static QeCurve exponential_through(double nm_a, double qe_a, double nm_b, double qe_b, double lo_nm, double hi_nm) {
    if (!(qe_a > 0.0 && qe_b > 0.0 && qe_a <= 1.0 && qe_b <= 1.0 && qe_b <= qe_a && nm_b > nm_a))
      throw ConstructionError("exponential QE needs 0 < qe_b <= qe_a <= 1 at increasing wavelengths");
    QeCurve c;
    c.kind = QeKind::exponential_decay;
    c.qe0 = qe_a;
    c.reference_nm = nm_a;
    c.decay_nm = qe_b == qe_a ? std::numeric_limits<double>::infinity() : (nm_b - nm_a) / std::log(qe_a / qe_b);
    c.support_lo_nm = lo_nm;
    c.support_hi_nm = hi_nm;
    if (c.qe0 * std::exp(-(lo_nm - nm_a) / c.decay_nm) > 1.0)
      throw ConstructionError("exponential QE exceeds 1 inside its support");
    return c;
  }

  static QeCurve tabulated(std::vector<double> nm, std::vector<double> qe) {
    if (nm.size() < 2 || nm.size() != qe.size()) throw ConstructionError("tabulated QE needs >= 2 (nm, qe) pairs");
    if (std::adjacent_find(nm.begin(), nm.end(), std::greater_equal<>()) != nm.end())
      throw ConstructionError("tabulated QE wavelengths must be strictly increasing");
    if (std::any_of(qe.begin(), qe.end(), [](double v) { return !(v >= 0.0 && v <= 1.0); }))
      throw ConstructionError("tabulated QE values must lie in [0, 1]");
    QeCurve c;
    c.kind = QeKind::tabulated;
    c.support_lo_nm = nm.front();
    c.support_hi_nm = nm.back();
    c.table_nm = std::move(nm);
    c.table_qe = std::move(qe);
    return c;
  }
};

struct DetectorModel {
  std::string name;
  QeCurve qe;
  double dark_rate = 0.0;  // counts/s
  double dead_time_s = 0.0;
};

/// Built-in detectors. The QE curves are stand-ins shaped after the stated
/// behaviour: the SSPD decays exponentially from 12 % at 900 nm to 5 % at
/// 1200 nm over 700–1500 nm; the Si SPAD is flat 40 % up to 1000 nm and falls
/// linearly to zero at its 1100 nm cutoff.
inline DetectorModel detector_preset(std::string_view name) {
  if (name == "sspd") return {"sspd", QeCurve::exponential_through(900.0, 0.12, 1200.0, 0.05, 700.0, 1500.0), 10.0, 0.0};
  if (name == "spad")
    return {"spad", QeCurve::tabulated({400.0, 1000.0, 1100.0}, {0.40, 0.40, 0.0}), 50.0, 0.0};
  if (name == "ideal") return {"ideal", QeCurve::flat(1.0, 200.0, 5000.0), 0.0, 0.0};
  throw ConfigError("detector", 0, "unknown detector preset '" + std::string(name) + "' (expected sspd, spad, ideal)");
}

inline std::vector<std::string> detector_preset_names() { return {"sspd", "spad", "ideal"}; }

/// Tabulated QE from CSV text with rows `wavelength_nm,qe`; a non-numeric first row is a header.
inline QeCurve parse_qe_csv(const std::string& text) {
  std::vector<double> nm, qe;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("qe_csv", line_no, "expected 'wavelength_nm,qe'");
    try {
      const double a = std::stod(line.substr(0, comma));
      const double b = std::stod(line.substr(comma + 1));
      nm.push_back(a);
      qe.push_back(b);
    } catch (const std::exception&) {
      if (nm.empty() && line_no == 1) continue;  // header
      throw ConfigError("qe_csv", line_no, "non-numeric value");
    }
  }
  return QeCurve::tabulated(std::move(nm), std::move(qe));
}

struct EffectiveRate {
  double rate = 0.0;  // counts/s
  std::vector<std::string> warnings;
};

/// ∫ Φ(λ)·η(λ) dλ + dark rate, with Φ the spectrum density read as photons/s/nm
/// against the spectrum's wavelengths.
inline EffectiveRate effective_rate(const Spectrum& photon_flux, const DetectorModel& detector) {
  validate(photon_flux);
  const auto wl = photon_flux.wavelengths_nm();
  const auto w = trapezoid_weights(wl);
  double signal = 0.0;
  bool overlap = false;
  for (std::size_t i = 0; i < wl.size(); ++i) {
    const double eta = detector.qe(wl[i]);
    if (wl[i] >= detector.qe.support_lo_nm && wl[i] <= detector.qe.support_hi_nm) overlap = true;
    signal += w[i] * photon_flux.density[i] * eta;
  }
  EffectiveRate r{signal + detector.dark_rate, {}};
  if (!overlap) r.warnings.push_back("source and detector supports are disjoint: dark counts only");
  return r;
}

struct CountRecord {
  std::int64_t counts = 0;
  double window_s = 0.0;
  double expected_rate = 0.0;  // Poisson mean / window actually used
};

/// One counting window. With a non-zero dead time the mean rate is reduced by
/// the non-paralyzable factor 1/(1 + rate·dead_time) before sampling.
template <class Engine>
CountRecord sample_counts(double rate, double window_s, Engine& engine, double dead_time_s = 0.0) {
  if (!(rate >= 0.0)) throw DomainError("sample_counts: rate must be >= 0");
  if (!(window_s > 0.0)) throw DomainError("sample_counts: window must be > 0");
  const double effective = dead_time_s > 0.0 ? rate / (1.0 + rate * dead_time_s) : rate;
  CountRecord rec{0, window_s, effective};
  const double mean = effective * window_s;
  if (mean > 0.0) {
    std::poisson_distribution<std::int64_t> poisson(mean);
    rec.counts = poisson(engine);
  }
  return rec;
}

/// Pointwise Poisson sampling of an ideal trace:
///   rate(x) = flux_scale·value(x)·band_qe + dark_rate,
/// each point drawn from substream(seed, scan_index, point index).
inline Interferogram count_interferogram(const Interferogram& ideal, const DetectorModel& detector, double flux_scale,
                                         double window_s, std::uint64_t seed, std::uint64_t scan_index = 0,
                                         unsigned threads = 1) {
  if (ideal.kind != InterferogramKind::ideal_intensity)
    throw DomainError("count_interferogram: input must be an ideal-intensity interferogram");
  if (!(flux_scale >= 0.0)) throw DomainError("count_interferogram: flux_scale must be >= 0");
  Interferogram out = ideal;
  out.kind = InterferogramKind::photon_counts;
  out.window_s = window_s;
  std::vector<char> clamped(ideal.values.size(), 0);
  parallel_for(ideal.values.size(), threads, [&](std::size_t i) {
    double v = ideal.values[i];
    if (v < 0.0) {
      v = 0.0;
      clamped[i] = 1;
    }
    const double rate = flux_scale * v * ideal.band_qe + detector.dark_rate;
    auto engine = substream(seed, scan_index, i);
    out.values[i] = static_cast<double>(sample_counts(rate, window_s, engine, detector.dead_time_s).counts);
  });
  if (const auto n = std::count(clamped.begin(), clamped.end(), 1); n > 0)
    out.warnings.push_back("clamped " + std::to_string(n) + " negative ideal values to 0");
  return out;
}

}  // namespace cdisim
