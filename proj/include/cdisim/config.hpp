#pragma once

// Run configuration: strict YAML parsing with unit-suffixed field names.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cdisim/detail/yaml_util.hpp"
#include "cdisim/detection.hpp"
#include "cdisim/errors.hpp"
#include "cdisim/grating.hpp"
#include "cdisim/material.hpp"
#include "cdisim/scan.hpp"
#include "cdisim/spectrum.hpp"

namespace cdisim {

enum class Experiment { spectrum, sweep, ascan, bscan, pellicle, design };

inline const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::spectrum: return "spectrum";
    case Experiment::sweep: return "sweep";
    case Experiment::ascan: return "ascan";
    case Experiment::bscan: return "bscan";
    case Experiment::pellicle: return "pellicle";
    case Experiment::design: return "design";
  }
  return "?";
}

inline bool produces_counts(Experiment e) { return e == Experiment::ascan || e == Experiment::bscan; }

struct WavelengthGrid {
  double start_nm = 700.0;
  double stop_nm = 1500.0;
  double step_nm = 0.5;
};

struct GratingChoice {
  std::string preset;  // empty for a custom grating
  double b1_um = 0.0;
  double zeta_per_um = 0.0;
  int n_periods = 0;
};

enum class SourceKind { spdc, gaussian, tabulated };

struct SourceChoice {
  SourceKind kind = SourceKind::spdc;
  std::string preset;  // "spdc", "sld930" or empty
  double center_nm = 0.0;
  double fwhm_nm = 0.0;
  std::filesystem::path path;  // tabulated spectrum CSV
};

struct DetectorChoice {
  std::string preset = "sspd";
  std::filesystem::path qe_csv;  // replaces the preset's QE when set
  std::optional<double> dark_rate_per_s;
  std::optional<double> dead_time_s;
};

enum class SampleKind { mirror, pellicle };

struct SampleChoice {
  SampleKind kind = SampleKind::mirror;
  double depth_um = 35.0;
  double reflectance = 1.0;
  double index = 1.5;
  double thickness_um = 2.0;
};

enum class PhantomKind { onion, mirror };

struct PhantomChoice {
  PhantomKind kind = PhantomKind::onion;
  std::vector<OnionCell> cells = default_onion_cells();
  OnionOptions onion{};
  double mirror_depth_um = 35.0;
};

struct SweepChoice {
  double start_c = 25.0;
  double stop_c = 200.0;
  double step_c = 2.5;
};

struct PellicleChoice {
  double index = 1.5;
  double thickness_um = 2.0;
  double start_um = -10.0;
  double step_um = 0.05;
  std::size_t points = 401;
};

struct DesignChoice {
  double target_center_nm = 1064.0;
  double target_fwhm_nm = 300.0;
  double b1_min_um = 7.0;
  double b1_max_um = 8.5;
  double zeta_min_per_um = 0.0;
  double zeta_max_per_um = 8e-6;
  int n_periods = 2515;
  int grid_points = 7;
  int max_evaluations = 150;
};

struct RunConfig {
  Experiment experiment = Experiment::spectrum;
  std::filesystem::path material_path;
  GratingChoice grating{"max"};
  double temperature_c = 80.0;
  double pump_wavelength_nm = 532.0;
  WavelengthGrid grid{};
  Normalization normalization = Normalization::peak_one;
  SourceChoice source{};
  DetectorChoice detector{};
  ScanProtocol protocol{};
  SampleChoice sample{};
  PhantomChoice phantom{};
  SweepChoice sweep{};
  PellicleChoice pellicle{};
  DesignChoice design{};
  double flux_scale = AcquisitionOptions{}.flux_scale;
  double reference_reflectance = AcquisitionOptions{}.reference_reflectance;
  double envelope_smoothing_um = AcquisitionOptions{}.envelope.smoothing_um;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir = "out";
  unsigned threads = 0;  // 0: CDISIM_THREADS or hardware concurrency
  std::string text;      // the configuration as written
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<unsigned> threads;
};

namespace detail {

inline const std::vector<std::string>& top_level_keys() {
  static const std::vector<std::string> keys = {
      "experiment", "material", "grating", "temperature_c", "pump_wavelength_nm", "wavelength_grid",
      "normalization", "source", "detector", "protocol", "sample", "phantom", "sweep", "pellicle", "design",
      "flux_scale", "reference_reflectance", "envelope_smoothing_um", "seed", "output_dir", "threads"};
  return keys;
}

inline double positive(const YAML::Node& node, const std::string& field) {
  const double v = as_double(node, field);
  if (!(v > 0.0)) throw ConfigError(field, line_of(node), "must be positive");
  return v;
}

inline int as_int(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<int>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, line_of(node), "expected an integer");
  }
}

inline void read_if(const YAML::Node& map, const char* key, const std::string& prefix, double& out) {
  if (map[key]) out = as_double(map[key], prefix + key);
}

inline std::filesystem::path resolve_path(const std::string& value, const std::filesystem::path& base_dir) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base_dir / p;
}

inline GratingChoice parse_grating(const YAML::Node& node) {
  GratingChoice g;
  if (node.IsScalar()) {
    g.preset = node.as<std::string>();
    try {
      (void)grating_preset(g.preset);
    } catch (const ConfigError& e) {
      throw ConfigError("grating", line_of(node), e.what());
    }
    return g;
  }
  require_known_keys(node, {"b1_um", "zeta_per_um", "n_periods"}, "grating");
  for (const char* k : {"b1_um", "zeta_per_um", "n_periods"})
    if (!node[k]) throw ConfigError(std::string("grating.") + k, line_of(node), "missing required field");
  g.b1_um = as_double(node["b1_um"], "grating.b1_um");
  g.zeta_per_um = as_double(node["zeta_per_um"], "grating.zeta_per_um");
  g.n_periods = as_int(node["n_periods"], "grating.n_periods");
  try {
    validate(GratingSpec{g.b1_um, g.zeta_per_um, g.n_periods, {}});
  } catch (const ConstructionError& e) {
    throw ConfigError("grating.zeta_per_um", line_of(node["zeta_per_um"]), e.what());
  }
  return g;
}

inline SourceChoice parse_source(const YAML::Node& node, const std::filesystem::path& base_dir) {
  SourceChoice s;
  if (node.IsScalar()) {
    const auto name = node.as<std::string>();
    if (name == "spdc") {
      s.kind = SourceKind::spdc;
    } else if (name == "sld930") {
      s.kind = SourceKind::gaussian;
      s.center_nm = 930.0;
      s.fwhm_nm = 70.0;
    } else {
      std::string msg = "unknown source '" + name + "' (expected spdc, sld930, gaussian_sld or tabulated)";
      if (const auto hint = suggest(name, {"spdc", "sld930"}); !hint.empty()) msg += "; did you mean '" + hint + "'?";
      throw ConfigError("source", line_of(node), msg);
    }
    s.preset = name;
    return s;
  }
  require_known_keys(node, {"gaussian_sld", "tabulated"}, "source");
  if (node.size() != 1) throw ConfigError("source", line_of(node), "exactly one source block is required");
  if (const auto g = node["gaussian_sld"]) {
    require_known_keys(g, {"center_nm", "fwhm_nm"}, "source.gaussian_sld");
    for (const char* k : {"center_nm", "fwhm_nm"})
      if (!g[k]) throw ConfigError(std::string("source.gaussian_sld.") + k, line_of(g), "missing required field");
    s.kind = SourceKind::gaussian;
    s.center_nm = positive(g["center_nm"], "source.gaussian_sld.center_nm");
    s.fwhm_nm = positive(g["fwhm_nm"], "source.gaussian_sld.fwhm_nm");
  } else {
    const auto t = node["tabulated"];
    s.kind = SourceKind::tabulated;
    s.path = resolve_path(as_string(t, "source.tabulated"), base_dir);
    if (!std::filesystem::exists(s.path)) throw ConfigError("source.tabulated", line_of(t), "file not found: " + s.path.string());
  }
  return s;
}

inline DetectorChoice parse_detector(const YAML::Node& node, const std::filesystem::path& base_dir) {
  DetectorChoice d;
  auto check_preset = [](const std::string& name, const YAML::Node& at) {
    try {
      (void)detector_preset(name);
    } catch (const ConfigError& e) {
      throw ConfigError("detector", line_of(at), e.what());
    }
  };
  if (node.IsScalar()) {
    d.preset = node.as<std::string>();
    check_preset(d.preset, node);
    return d;
  }
  require_known_keys(node, {"preset", "qe_csv", "dark_rate_per_s", "dead_time_s"}, "detector");
  if (node["preset"]) {
    d.preset = as_string(node["preset"], "detector.preset");
    check_preset(d.preset, node["preset"]);
  }
  if (node["qe_csv"]) {
    d.qe_csv = resolve_path(as_string(node["qe_csv"], "detector.qe_csv"), base_dir);
    if (!std::filesystem::exists(d.qe_csv))
      throw ConfigError("detector.qe_csv", line_of(node["qe_csv"]), "file not found: " + d.qe_csv.string());
  }
  if (node["dark_rate_per_s"]) {
    const double v = as_double(node["dark_rate_per_s"], "detector.dark_rate_per_s");
    if (!(v >= 0.0)) throw ConfigError("detector.dark_rate_per_s", line_of(node["dark_rate_per_s"]), "must be >= 0");
    d.dark_rate_per_s = v;
  }
  if (node["dead_time_s"]) {
    const double v = as_double(node["dead_time_s"], "detector.dead_time_s");
    if (!(v >= 0.0)) throw ConfigError("detector.dead_time_s", line_of(node["dead_time_s"]), "must be >= 0");
    d.dead_time_s = v;
  }
  return d;
}

inline ScanProtocol parse_protocol(const YAML::Node& node) {
  require_known_keys(node, {"z_start_um", "z_range_um", "z_step_um", "dwell_s", "x_start_um", "x_range_um", "x_step_um"},
                     "protocol");
  ScanProtocol p;
  read_if(node, "z_start_um", "protocol.", p.z_start_um);
  read_if(node, "z_range_um", "protocol.", p.z_range_um);
  read_if(node, "z_step_um", "protocol.", p.z_step_um);
  read_if(node, "dwell_s", "protocol.", p.dwell_s);
  read_if(node, "x_start_um", "protocol.", p.x_start_um);
  read_if(node, "x_range_um", "protocol.", p.x_range_um);
  read_if(node, "x_step_um", "protocol.", p.x_step_um);
  try {
    (void)protocol_shape(p);
  } catch (const DomainError& e) {
    throw ConfigError("protocol", line_of(node), e.what());
  }
  return p;
}

inline SampleChoice parse_sample(const YAML::Node& node) {
  require_known_keys(node, {"kind", "depth_um", "reflectance", "index", "thickness_um"}, "sample");
  SampleChoice s;
  if (node["kind"]) {
    const auto kind = as_string(node["kind"], "sample.kind");
    if (kind == "mirror")
      s.kind = SampleKind::mirror;
    else if (kind == "pellicle")
      s.kind = SampleKind::pellicle;
    else
      throw ConfigError("sample.kind", line_of(node["kind"]), "expected mirror or pellicle");
  }
  read_if(node, "depth_um", "sample.", s.depth_um);
  read_if(node, "reflectance", "sample.", s.reflectance);
  read_if(node, "index", "sample.", s.index);
  read_if(node, "thickness_um", "sample.", s.thickness_um);
  return s;
}

inline PhantomChoice parse_phantom(const YAML::Node& node) {
  PhantomChoice p;
  if (node.IsScalar()) {
    const auto name = node.as<std::string>();
    if (name != "onion") throw ConfigError("phantom", line_of(node), "expected 'onion' or a phantom block");
    return p;
  }
  require_known_keys(node, {"onion", "mirror"}, "phantom");
  if (node.size() != 1) throw ConfigError("phantom", line_of(node), "exactly one phantom block is required");
  if (const auto m = node["mirror"]) {
    require_known_keys(m, {"depth_um"}, "phantom.mirror");
    p.kind = PhantomKind::mirror;
    read_if(m, "depth_um", "phantom.mirror.", p.mirror_depth_um);
    return p;
  }
  const auto o = node["onion"];
  require_known_keys(o, {"cells", "membrane_reflectance", "undulation_um", "merge_tolerance_um"}, "phantom.onion");
  read_if(o, "membrane_reflectance", "phantom.onion.", p.onion.membrane_reflectance);
  read_if(o, "undulation_um", "phantom.onion.", p.onion.undulation_um);
  read_if(o, "merge_tolerance_um", "phantom.onion.", p.onion.merge_tolerance_um);
  if (const auto cells = o["cells"]) {
    if (!cells.IsSequence() || cells.size() == 0)
      throw ConfigError("phantom.onion.cells", line_of(cells), "expected a non-empty list of cells");
    p.cells.clear();
    for (const auto& c : cells) {
      require_known_keys(c, {"depth_top_um", "depth_bottom_um", "x_extents_um"}, "phantom.onion.cells");
      for (const char* k : {"depth_top_um", "depth_bottom_um", "x_extents_um"})
        if (!c[k]) throw ConfigError(std::string("phantom.onion.cells.") + k, line_of(c), "missing required field");
      OnionCell cell;
      cell.depth_top_um = as_double(c["depth_top_um"], "phantom.onion.cells.depth_top_um");
      cell.depth_bottom_um = as_double(c["depth_bottom_um"], "phantom.onion.cells.depth_bottom_um");
      if (!(cell.depth_top_um < cell.depth_bottom_um))
        throw ConfigError("phantom.onion.cells.depth_bottom_um", line_of(c), "must exceed depth_top_um");
      const auto extents = c["x_extents_um"];
      if (!extents.IsSequence() || extents.size() == 0)
        throw ConfigError("phantom.onion.cells.x_extents_um", line_of(extents), "expected a list of [lo, hi] pairs");
      for (const auto& e : extents) {
        const auto pair = as_pair(e, "phantom.onion.cells.x_extents_um");
        cell.x_extents_um.emplace_back(pair[0], pair[1]);
      }
      p.cells.push_back(std::move(cell));
    }
  }
  return p;
}

inline SweepChoice parse_sweep(const YAML::Node& node) {
  require_known_keys(node, {"start_c", "stop_c", "step_c"}, "sweep");
  SweepChoice s;
  read_if(node, "start_c", "sweep.", s.start_c);
  read_if(node, "stop_c", "sweep.", s.stop_c);
  read_if(node, "step_c", "sweep.", s.step_c);
  if (!(s.step_c > 0.0)) throw ConfigError("sweep.step_c", line_of(node), "must be positive");
  if (!(s.stop_c >= s.start_c)) throw ConfigError("sweep.stop_c", line_of(node), "must be >= start_c");
  return s;
}

inline PellicleChoice parse_pellicle(const YAML::Node& node) {
  require_known_keys(node, {"index", "thickness_um", "start_um", "step_um", "points"}, "pellicle");
  PellicleChoice p;
  read_if(node, "index", "pellicle.", p.index);
  read_if(node, "thickness_um", "pellicle.", p.thickness_um);
  read_if(node, "start_um", "pellicle.", p.start_um);
  if (node["step_um"]) p.step_um = positive(node["step_um"], "pellicle.step_um");
  if (node["points"]) {
    const int n = as_int(node["points"], "pellicle.points");
    if (n < 2) throw ConfigError("pellicle.points", line_of(node["points"]), "must be at least 2");
    p.points = static_cast<std::size_t>(n);
  }
  if (!(p.index > 1.0)) throw ConfigError("pellicle.index", line_of(node), "must exceed 1");
  if (!(p.thickness_um > 0.0)) throw ConfigError("pellicle.thickness_um", line_of(node), "must be positive");
  return p;
}

inline DesignChoice parse_design(const YAML::Node& node) {
  require_known_keys(node,
                     {"target_center_nm", "target_fwhm_nm", "b1_min_um", "b1_max_um", "zeta_min_per_um",
                      "zeta_max_per_um", "n_periods", "grid_points", "max_evaluations"},
                     "design");
  DesignChoice d;
  read_if(node, "target_center_nm", "design.", d.target_center_nm);
  read_if(node, "target_fwhm_nm", "design.", d.target_fwhm_nm);
  read_if(node, "b1_min_um", "design.", d.b1_min_um);
  read_if(node, "b1_max_um", "design.", d.b1_max_um);
  read_if(node, "zeta_min_per_um", "design.", d.zeta_min_per_um);
  read_if(node, "zeta_max_per_um", "design.", d.zeta_max_per_um);
  if (node["n_periods"]) d.n_periods = as_int(node["n_periods"], "design.n_periods");
  if (node["grid_points"]) d.grid_points = as_int(node["grid_points"], "design.grid_points");
  if (node["max_evaluations"]) d.max_evaluations = as_int(node["max_evaluations"], "design.max_evaluations");
  if (!(d.b1_min_um > 0.0 && d.b1_max_um >= d.b1_min_um))
    throw ConfigError("design.b1_max_um", line_of(node), "need 0 < b1_min_um <= b1_max_um");
  if (!(d.zeta_max_per_um >= d.zeta_min_per_um))
    throw ConfigError("design.zeta_max_per_um", line_of(node), "need zeta_min_per_um <= zeta_max_per_um");
  if (d.n_periods < 1) throw ConfigError("design.n_periods", line_of(node), "must be at least 1");
  if (d.grid_points < 2) throw ConfigError("design.grid_points", line_of(node), "must be at least 2");
  return d;
}

}  // namespace detail

/// Parses and validates a run configuration. Relative paths resolve against
/// `base_dir` (normally the directory holding the configuration file).
inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".",
                              const ConfigOverrides& overrides = {}) {
  using namespace detail;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, std::string("parse error: ") + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("", 0, "configuration must be a mapping");
  require_known_keys(root, top_level_keys(), "");

  RunConfig c;
  c.text = text;
  if (!root["experiment"]) throw ConfigError("experiment", 0, "missing required field");
  {
    const auto name = as_string(root["experiment"], "experiment");
    const std::vector<std::string> names = {"spectrum", "sweep", "ascan", "bscan", "pellicle", "design"};
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      std::string msg = "unknown experiment '" + name + "'";
      if (const auto hint = suggest(name, names); !hint.empty()) msg += " (did you mean '" + hint + "'?)";
      throw ConfigError("experiment", line_of(root["experiment"]), msg);
    }
    c.experiment = static_cast<Experiment>(it - names.begin());
  }

  if (!root["material"]) throw ConfigError("material", 0, "missing required field");
  c.material_path = resolve_path(as_string(root["material"], "material"), base_dir);
  if (!std::filesystem::exists(c.material_path))
    throw ConfigError("material", line_of(root["material"]), "file not found: " + c.material_path.string());

  if (root["grating"]) c.grating = parse_grating(root["grating"]);
  read_if(root, "temperature_c", "", c.temperature_c);
  if (root["pump_wavelength_nm"]) c.pump_wavelength_nm = positive(root["pump_wavelength_nm"], "pump_wavelength_nm");
  if (const auto g = root["wavelength_grid"]) {
    require_known_keys(g, {"start_nm", "stop_nm", "step_nm"}, "wavelength_grid");
    read_if(g, "start_nm", "wavelength_grid.", c.grid.start_nm);
    read_if(g, "stop_nm", "wavelength_grid.", c.grid.stop_nm);
    read_if(g, "step_nm", "wavelength_grid.", c.grid.step_nm);
    if (!(c.grid.start_nm > 0.0 && c.grid.stop_nm > c.grid.start_nm && c.grid.step_nm > 0.0))
      throw ConfigError("wavelength_grid", line_of(g), "need 0 < start_nm < stop_nm and step_nm > 0");
  }
  if (root["normalization"]) {
    const auto n = as_string(root["normalization"], "normalization");
    if (n == "raw")
      c.normalization = Normalization::raw;
    else if (n == "peak_one")
      c.normalization = Normalization::peak_one;
    else if (n == "unit_area")
      c.normalization = Normalization::unit_area;
    else
      throw ConfigError("normalization", line_of(root["normalization"]), "expected raw, peak_one or unit_area");
  }
  if (root["source"]) c.source = parse_source(root["source"], base_dir);
  if (root["detector"]) c.detector = parse_detector(root["detector"], base_dir);
  if (root["protocol"]) c.protocol = parse_protocol(root["protocol"]);
  if (root["sample"]) c.sample = parse_sample(root["sample"]);
  if (root["phantom"]) c.phantom = parse_phantom(root["phantom"]);
  if (root["sweep"]) c.sweep = parse_sweep(root["sweep"]);
  if (root["pellicle"]) c.pellicle = parse_pellicle(root["pellicle"]);
  if (root["design"]) c.design = parse_design(root["design"]);
  if (root["flux_scale"]) {
    c.flux_scale = as_double(root["flux_scale"], "flux_scale");
    if (!(c.flux_scale >= 0.0)) throw ConfigError("flux_scale", line_of(root["flux_scale"]), "must be >= 0");
  }
  if (root["reference_reflectance"]) {
    c.reference_reflectance = as_double(root["reference_reflectance"], "reference_reflectance");
    if (!(c.reference_reflectance >= 0.0 && c.reference_reflectance <= 1.0))
      throw ConfigError("reference_reflectance", line_of(root["reference_reflectance"]), "must lie in [0, 1]");
  }
  if (root["envelope_smoothing_um"]) {
    c.envelope_smoothing_um = as_double(root["envelope_smoothing_um"], "envelope_smoothing_um");
    if (!(c.envelope_smoothing_um >= 0.0))
      throw ConfigError("envelope_smoothing_um", line_of(root["envelope_smoothing_um"]), "must be >= 0");
  }
  if (root["seed"]) {
    try {
      c.seed = root["seed"].as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      throw ConfigError("seed", line_of(root["seed"]), "expected an unsigned 64-bit integer");
    }
  }
  c.output_dir = root["output_dir"] ? resolve_path(as_string(root["output_dir"], "output_dir"), base_dir)
                                    : base_dir / c.output_dir;
  if (root["threads"]) {
    const int t = as_int(root["threads"], "threads");
    if (t < 0) throw ConfigError("threads", line_of(root["threads"]), "must be >= 0");
    c.threads = static_cast<unsigned>(t);
  }

  if (overrides.seed) c.seed = overrides.seed;
  if (overrides.output_dir) c.output_dir = *overrides.output_dir;
  if (overrides.threads) c.threads = *overrides.threads;

  if (produces_counts(c.experiment) && !c.seed)
    throw ConfigError("seed", 0, std::string("required for the '") + to_string(c.experiment) + "' experiment");
  if (c.source.kind == SourceKind::tabulated && c.experiment != Experiment::ascan &&
      c.experiment != Experiment::bscan && c.experiment != Experiment::pellicle)
    throw ConfigError("source", line_of(root["source"]), "a tabulated source only applies to interferometric experiments");
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open configuration file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path().empty() ? "." : path.parent_path(), overrides);
}

}  // namespace cdisim
