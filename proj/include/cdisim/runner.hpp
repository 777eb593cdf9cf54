#pragma once

// Executes a run configuration, writes artifacts atomically and records a
// JSON manifest (written last) describing inputs, outputs and warnings.

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <string>
#include <system_error>
#include <vector>

#include "cdisim/config.hpp"
#include "cdisim/design.hpp"
#include "cdisim/detection.hpp"
#include "cdisim/errors.hpp"
#include "cdisim/grating.hpp"
#include "cdisim/interferometry.hpp"
#include "cdisim/io.hpp"
#include "cdisim/material.hpp"
#include "cdisim/parallel.hpp"
#include "cdisim/qpm.hpp"
#include "cdisim/scan.hpp"
#include "cdisim/sources.hpp"

#ifndef CDISIM_VERSION
#define CDISIM_VERSION "0.0.0"
#endif

namespace cdisim {

inline constexpr const char* kVersion = CDISIM_VERSION;

struct RunResult {
  nlohmann::json manifest;
  int exit_code = 0;
};

namespace detail {

using nlohmann::json;

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& data) {
    write_file_atomic(dir_ / name, data);
    written_.push_back(name);
    outputs_.push_back({{"file", name}, {"bytes", data.size()}, {"sha256", sha256_hex(data)}});
  }

  void remove_all() {
    for (const auto& name : written_) {
      std::error_code ec;
      std::filesystem::remove(dir_ / name, ec);
    }
    written_.clear();
    outputs_ = json::array();
  }

  const json& outputs() const { return outputs_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
  json outputs_ = json::array();
};

struct RunContext {
  const RunConfig& config;
  ArtifactWriter& writer;
  json& results;
  json& resolved;
  std::vector<std::string>& warnings;
  unsigned threads;
};

inline void add_warnings(std::vector<std::string>& out, const std::vector<std::string>& in, const std::string& prefix) {
  for (const auto& w : in) out.push_back(prefix + w);
}

inline json protocol_json(const ScanProtocol& p) {
  return {{"z_start_um", p.z_start_um}, {"z_range_um", p.z_range_um}, {"z_step_um", p.z_step_um},
          {"dwell_s", p.dwell_s},       {"x_start_um", p.x_start_um}, {"x_range_um", p.x_range_um},
          {"x_step_um", p.x_step_um}};
}

inline GratingSpec resolve_grating(const RunConfig& c, const Material& m, json& resolved) {
  GratingSpec spec = c.grating.preset.empty()
                         ? make_grating_spec(c.grating.b1_um, c.grating.zeta_per_um, c.grating.n_periods, m.expansion)
                         : grating_preset(c.grating.preset, m.expansion);
  resolved["grating"] = {{"preset", c.grating.preset.empty() ? "custom" : c.grating.preset},
                         {"b1_um", spec.b1_um},
                         {"zeta_per_um", spec.zeta_per_um},
                         {"n_periods", spec.n_periods}};
  return spec;
}

inline std::vector<double> omega_grid(const RunConfig& c) {
  return omega_grid_from_wavelengths(c.grid.start_nm, c.grid.stop_nm, c.grid.step_nm);
}

inline Spectrum resolve_source(RunContext& ctx, const Material& m) {
  const auto& c = ctx.config;
  Spectrum s;
  switch (c.source.kind) {
    case SourceKind::spdc: {
      const auto spec = resolve_grating(c, m, ctx.resolved);
      s = spdc_spectrum(m.dispersion, PumpConfig{c.pump_wavelength_nm}, spec, omega_grid(c), c.temperature_c,
                        Normalization::peak_one, ctx.threads);
      s.label = "spdc";
      break;
    }
    case SourceKind::gaussian:
      s = gaussian_source(c.source.center_nm, c.source.fwhm_nm, omega_grid(c));
      if (!c.source.preset.empty()) s.label = c.source.preset;
      break;
    case SourceKind::tabulated:
      s = parse_spectrum_csv(read_file(c.source.path));
      break;
  }
  ctx.resolved["source"] = {{"label", s.label}, {"points", s.size()}};
  if (c.source.kind == SourceKind::gaussian)
    ctx.resolved["source"].update({{"center_nm", c.source.center_nm}, {"fwhm_nm", c.source.fwhm_nm}});
  add_warnings(ctx.warnings, s.warnings, "source: ");
  return s;
}

inline DetectorModel resolve_detector(RunContext& ctx) {
  const auto& d = ctx.config.detector;
  auto det = detector_preset(d.preset);
  if (!d.qe_csv.empty()) {
    det.qe = parse_qe_csv(read_file(d.qe_csv));
    det.name += "+csv";
  }
  if (d.dark_rate_per_s) det.dark_rate = *d.dark_rate_per_s;
  if (d.dead_time_s) det.dead_time_s = *d.dead_time_s;
  ctx.resolved["detector"] = {{"name", det.name}, {"dark_rate_per_s", det.dark_rate}, {"dead_time_s", det.dead_time_s}};
  return det;
}

inline json width_json(const SpectralWidth& w) {
  return {{"fwhm_nm", w.fwhm_nm},       {"center_nm", w.center_nm},   {"fwhm_omega", w.fwhm_omega},
          {"multimodal", w.multimodal}, {"truncated", w.truncated}, {"interval_count", w.interval_count}};
}

inline json peaks_json(const std::vector<Peak>& peaks) {
  json out = json::array();
  for (const auto& p : peaks) out.push_back({{"position_um", p.position_um}, {"height", p.height}, {"prominence", p.prominence}});
  return out;
}

inline json envelope_json(const EnvelopeResult& e) {
  json out = {{"peaks", peaks_json(e.peaks)}, {"half_max_intervals", e.half_max_support.size()}};
  out["fwhm_um"] = e.fwhm_of_main_peak_um ? json(*e.fwhm_of_main_peak_um) : json(nullptr);
  out["main_peak_um"] = e.main_peak_um;
  return out;
}

inline std::string spectrum_csv(const Spectrum& s) {
  return csv_text({"wavelength_nm", "density"}, {s.wavelengths_nm(), s.density});
}

inline void run_spectrum(RunContext& ctx, const Material& m) {
  const auto& c = ctx.config;
  const auto spec = resolve_grating(c, m, ctx.resolved);
  const auto s = spdc_spectrum(m.dispersion, PumpConfig{c.pump_wavelength_nm}, spec, omega_grid(c), c.temperature_c,
                               c.normalization, ctx.threads);
  add_warnings(ctx.warnings, s.warnings, "spectrum: ");
  ctx.writer.write("spectrum.csv", spectrum_csv(s));
  const auto realization = realize(spec, c.temperature_c);
  ctx.results["total_length_um"] = realization.total_length_um;
  try {
    ctx.results["width"] = width_json(spectral_fwhm(s));
  } catch (const UndefinedWidthError& e) {
    ctx.warnings.push_back(std::string("spectrum: ") + e.what());
  }
}

/// Wide layout: header `temperature_c,<λ1>,<λ2>,...`, then one row per temperature.
inline std::string brightness_csv(const BrightnessMap& map) {
  std::string out = "temperature_c";
  for (const double l : map.wavelengths_nm) out += "," + format_double(l);
  out += '\n';
  const std::size_t nw = map.wavelengths_nm.size();
  for (std::size_t t = 0; t < map.temperatures_c.size(); ++t) {
    out += format_double(map.temperatures_c[t]);
    for (std::size_t w = 0; w < nw; ++w) out += "," + format_double(map.values[t * nw + w]);
    out += '\n';
  }
  return out;
}

inline void run_sweep(RunContext& ctx, const Material& m) {
  const auto& c = ctx.config;
  const auto spec = resolve_grating(c, m, ctx.resolved);
  const auto temps = uniform_grid(c.sweep.start_c, c.sweep.step_c,
                                  static_cast<std::size_t>(std::floor((c.sweep.stop_c - c.sweep.start_c) / c.sweep.step_c + 1e-9)) + 1);
  std::vector<double> wl;
  for (std::size_t i = 0;; ++i) {
    const double l = c.grid.start_nm + static_cast<double>(i) * c.grid.step_nm;
    if (l > c.grid.stop_nm + 1e-9 * c.grid.step_nm) break;
    wl.push_back(l);
  }
  const auto map = temperature_sweep(m.dispersion, PumpConfig{c.pump_wavelength_nm}, spec, temps, wl, ctx.threads);
  ctx.writer.write("sweep.csv", brightness_csv(map));
  ctx.writer.write("sweep.pgm", pgm16_bytes(map.values, map.wavelengths_nm.size(), map.temperatures_c.size()));
  ctx.results["temperatures"] = map.temperatures_c.size();
  ctx.results["wavelengths"] = map.wavelengths_nm.size();
  ctx.results["normalization"] = map.normalization_note;
}

inline SampleResponse resolve_sample(const SampleChoice& s) {
  if (s.kind == SampleKind::mirror) return mirror_response(s.depth_um, s.reflectance);
  auto r = pellicle_response(s.index, s.thickness_um);
  for (auto& f : r.interfaces) f.optical_depth_um += s.depth_um;
  return r;
}

inline AcquisitionOptions acquisition(const RunConfig& c) {
  AcquisitionOptions o;
  o.flux_scale = c.flux_scale;
  o.reference_reflectance = c.reference_reflectance;
  o.envelope.smoothing_um = c.envelope_smoothing_um;
  return o;
}

inline void run_ascan(RunContext& ctx, const Material& m) {
  const auto& c = ctx.config;
  const auto source = resolve_source(ctx, m);
  const auto det = resolve_detector(ctx);
  const auto sample = resolve_sample(c.sample);
  const auto a = a_scan(source, det, sample, c.protocol, *c.seed, acquisition(c));
  add_warnings(ctx.warnings, a.warnings, "ascan: ");
  ctx.writer.write("ascan.csv", csv_text({"z_um", "counts", "envelope"},
                                         {a.counts.displacement_um, a.counts.values, a.envelope.envelope}));
  ctx.results["points"] = a.counts.values.size();
  ctx.results["duration_s"] = a.duration_s;
  ctx.results["peak_expected_counts"] = a.peak_expected_counts;
  ctx.results["envelope"] = envelope_json(a.envelope);
  ctx.resolved["protocol"] = protocol_json(c.protocol);
}

inline SamplePhantom resolve_phantom(const PhantomChoice& p) {
  if (p.kind == PhantomKind::mirror) return mirror_phantom(p.mirror_depth_um);
  return onion_phantom(p.cells, p.onion);
}

inline void run_bscan(RunContext& ctx, const Material& m) {
  const auto& c = ctx.config;
  const auto source = resolve_source(ctx, m);
  const auto det = resolve_detector(ctx);
  const auto phantom = resolve_phantom(c.phantom);
  const auto b = b_scan(source, det, phantom, c.protocol, *c.seed, acquisition(c), ctx.threads);
  add_warnings(ctx.warnings, b.warnings, "bscan: ");

  const std::size_t rows = b.rows(), cols = b.cols();
  std::vector<double> xs, zs, vs, counts;
  xs.reserve(rows * cols);
  zs.reserve(rows * cols);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < rows; ++j) {
      xs.push_back(b.x_positions_um[i]);
      zs.push_back(b.z_grid_um[j]);
    }
  ctx.writer.write("bscan.csv", csv_text({"x_um", "z_um", "envelope", "counts"}, {xs, zs, b.image, b.counts}));
  std::vector<double> row_major(rows * cols);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < rows; ++j) row_major[j * cols + i] = b.at(i, j);
  ctx.writer.write("bscan.pgm", pgm16_bytes(row_major, cols, rows));

  json columns = json::array();
  for (std::size_t i = 0; i < cols; ++i) {
    const auto& col = b.columns[i];
    columns.push_back({{"x_um", b.x_positions_um[i]},
                       {"peaks", peaks_json(col.peaks)},
                       {"fwhm_um", col.fwhm_um ? json(*col.fwhm_um) : json(nullptr)},
                       {"peak_expected_counts", col.peak_expected_counts}});
  }
  const json sidecar = {{"version", kVersion},
                        {"seed", b.seed},
                        {"protocol", protocol_json(b.protocol)},
                        {"source", b.source_label},
                        {"detector", b.detector_name},
                        {"phantom", b.phantom_name},
                        {"grating", c.grating.preset.empty() ? "custom" : c.grating.preset},
                        {"rows", rows},
                        {"columns", cols},
                        {"image_layout", "pgm rows = z, columns = x"},
                        {"nominal_duration_s", b.duration_s},
                        {"per_column", columns}};
  ctx.writer.write("bscan_meta.json", sidecar.dump(2) + "\n");
  ctx.results["rows"] = rows;
  ctx.results["columns"] = cols;
  ctx.results["nominal_duration_s"] = b.duration_s;
  ctx.resolved["protocol"] = protocol_json(c.protocol);
  ctx.resolved["phantom"] = b.phantom_name;
}

inline void run_pellicle(RunContext& ctx, const Material& m) {
  const auto& c = ctx.config;
  const auto source = resolve_source(ctx, m);
  const auto det = resolve_detector(ctx);
  const auto sample = pellicle_response(c.pellicle.index, c.pellicle.thickness_um);
  const auto grid = uniform_grid(c.pellicle.start_um, c.pellicle.step_um, c.pellicle.points);
  const auto trace = ideal_interferogram(source, det.qe, sample, grid, c.reference_reflectance);
  const auto env = envelope(trace);
  add_warnings(ctx.warnings, sample.warnings, "pellicle: ");
  add_warnings(ctx.warnings, trace.warnings, "pellicle: ");
  ctx.writer.write("pellicle.csv",
                   csv_text({"displacement_um", "intensity", "envelope"}, {trace.displacement_um, trace.values, env.envelope}));
  ctx.results["envelope"] = envelope_json(env);
  ctx.results["resolved"] = env.half_max_support.size() >= 2;
  if (env.peaks.size() >= 2) ctx.results["separation_um"] = env.peaks.back().position_um - env.peaks.front().position_um;
}

inline void run_design(RunContext& ctx, const Material& m) {
  const auto& c = ctx.config;
  DesignObjective objective{c.design.target_center_nm, c.design.target_fwhm_nm, c.temperature_c};
  DesignBounds bounds{c.design.b1_min_um, c.design.b1_max_um, c.design.zeta_min_per_um, c.design.zeta_max_per_um,
                      c.design.n_periods};
  DesignOptions options;
  options.omega_grid = omega_grid(c);
  options.grid_points = c.design.grid_points;
  options.refine.max_evaluations = c.design.max_evaluations;
  options.threads = ctx.threads;
  const PumpConfig pump{c.pump_wavelength_nm};
  const auto r = design_search(m, pump, objective, bounds, options);
  const auto s = spdc_spectrum(m.dispersion, pump, r.spec, options.omega_grid, c.temperature_c, Normalization::peak_one,
                               ctx.threads);
  ctx.writer.write("design_spectrum.csv", spectrum_csv(s));
  ctx.results["b1_um"] = r.spec.b1_um;
  ctx.results["zeta_per_um"] = r.spec.zeta_per_um;
  ctx.results["n_periods"] = r.spec.n_periods;
  ctx.results["achieved_center_nm"] = r.achieved.center_nm;
  ctx.results["achieved_fwhm_nm"] = r.achieved.fwhm_nm;
  ctx.results["objective"] = r.objective;
  ctx.results["evaluations"] = r.evaluations;
}

inline json config_echo(const RunConfig& c) {
  return {{"experiment", to_string(c.experiment)},
          {"material", c.material_path.string()},
          {"temperature_c", c.temperature_c},
          {"pump_wavelength_nm", c.pump_wavelength_nm},
          {"wavelength_grid", {{"start_nm", c.grid.start_nm}, {"stop_nm", c.grid.stop_nm}, {"step_nm", c.grid.step_nm}}},
          {"seed", c.seed ? json(*c.seed) : json(nullptr)},
          {"output_dir", c.output_dir.string()},
          {"flux_scale", c.flux_scale},
          {"reference_reflectance", c.reference_reflectance},
          {"text", c.text}};
}

}  // namespace detail

/// Runs the configured experiment. Never throws for experiment failures: the
/// manifest's `status` and the exit code report them, and any artifacts
/// already written are removed.
inline RunResult run(const RunConfig& config) {
  using nlohmann::json;
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(config.output_dir);
  detail::ArtifactWriter writer(config.output_dir);
  json results = json::object(), resolved = json::object();
  std::vector<std::string> warnings;
  const unsigned threads = resolve_threads(config.threads);
  detail::RunContext ctx{config, writer, results, resolved, warnings, threads};

  RunResult out;
  std::string error;
  try {
    const auto material = load_material(config.material_path);
    resolved["material"] = {{"name", material.name}, {"note", material.note},
                            {"alpha", material.expansion.alpha}, {"beta", material.expansion.beta}};
    switch (config.experiment) {
      case Experiment::spectrum: detail::run_spectrum(ctx, material); break;
      case Experiment::sweep: detail::run_sweep(ctx, material); break;
      case Experiment::ascan: detail::run_ascan(ctx, material); break;
      case Experiment::bscan: detail::run_bscan(ctx, material); break;
      case Experiment::pellicle: detail::run_pellicle(ctx, material); break;
      case Experiment::design: detail::run_design(ctx, material); break;
    }
  } catch (const std::exception& e) {
    error = e.what();
    writer.remove_all();
    out.exit_code = 1;
  }

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.manifest = {{"tool", "cdisim"},
                  {"version", kVersion},
                  {"status", error.empty() ? "ok" : "failed"},
                  {"experiment", to_string(config.experiment)},
                  {"config", detail::config_echo(config)},
                  {"resolved", resolved},
                  {"results", results},
                  {"outputs", writer.outputs()},
                  {"warnings", warnings},
                  {"timings", {{"wall_s", elapsed}, {"threads", threads}}}};
  if (!error.empty()) out.manifest["error"] = error;
  write_file_atomic(config.output_dir / "manifest.json", out.manifest.dump(2) + "\n");
  return out;
}

}  // namespace cdisim
