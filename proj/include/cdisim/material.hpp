#pragma once

// Temperature-dependent dispersion and thermal expansion of the nonlinear
// medium. Coefficients are data: they load from a material file rather than
// being compiled in.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cdisim/detail/yaml_util.hpp"
#include "cdisim/errors.hpp"
#include "cdisim/units.hpp"

namespace cdisim {

/// Closed interval; `contains` admits a relative slack of a few ulps so that
/// wavelengths recovered from angular frequencies still hit the end nodes.
struct Range {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const {
    const double slack = 1e-12 * std::max(std::abs(lo), std::abs(hi));
    return v >= lo - (std::isfinite(slack) ? slack : 0.0) && v <= hi + (std::isfinite(slack) ? slack : 0.0);
  }
  double clamp(double v) const { return std::clamp(v, lo, hi); }
};

enum class DispersionKind { constant, sellmeier, tabulated };

/// Refractive index model n(λ, T) of a single effective polarization.
///
/// The `sellmeier` kind evaluates the temperature-dependent form
///
///   n² = A + (B + b_T2·K²) / (λ² − (C + c_T2·K²)²) + E / (λ² − F²)
///          + G / (λ² − H²) + D·λ²,           K = T + 273.15,  λ in µm,
///
/// with any omitted coefficient taken as zero. The `constant` kind uses the
/// single coefficient `n`. The `tabulated` kind interpolates bilinearly in
/// (λ, T) over a rectangular grid of nodes.
struct DispersionModel {
  DispersionKind kind = DispersionKind::constant;
  std::map<std::string, double> coefficients;
  Range valid_wavelength_um{};
  Range valid_temperature_c{};

  // tabulated only; index[t * wavelengths.size() + w]
  std::vector<double> table_wavelengths_um;
  std::vector<double> table_temperatures_c;
  std::vector<double> table_index;

  static DispersionModel constant(double n, Range wavelength_um = {}, Range temperature_c = {}) {
    if (!(n >= 1.0)) throw ConstructionError("constant refractive index must be >= 1");
    DispersionModel m;
    m.kind = DispersionKind::constant;
    m.coefficients["n"] = n;
    m.valid_wavelength_um = wavelength_um;
    m.valid_temperature_c = temperature_c;
    return m;
  }

  static DispersionModel sellmeier(std::map<std::string, double> coefficients, Range wavelength_um,
                                   Range temperature_c) {
    static const std::vector<std::string> known = {"A", "B", "C", "D", "E", "F", "G", "H", "b_T2", "c_T2"};
    for (const auto& [name, value] : coefficients) {
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw ConstructionError("unknown Sellmeier coefficient '" + name + "'");
      if (!std::isfinite(value)) throw ConstructionError("Sellmeier coefficient '" + name + "' is not finite");
    }
    DispersionModel m;
    m.kind = DispersionKind::sellmeier;
    m.coefficients = std::move(coefficients);
    m.valid_wavelength_um = wavelength_um;
    m.valid_temperature_c = temperature_c;
    return m;
  }

  /// `index` is row-major with one row per temperature.
  static DispersionModel tabulated(std::vector<double> wavelengths_um, std::vector<double> temperatures_c,
                                   std::vector<double> index) {
    auto strictly_increasing = [](const std::vector<double>& v) {
      return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    if (wavelengths_um.empty() || temperatures_c.empty())
      throw ConstructionError("tabulated dispersion needs at least one wavelength and one temperature node");
    if (!strictly_increasing(wavelengths_um) || !strictly_increasing(temperatures_c))
      throw ConstructionError("tabulated dispersion nodes must be strictly increasing");
    if (index.size() != wavelengths_um.size() * temperatures_c.size())
      throw ConstructionError("tabulated dispersion table has wrong size");
    if (std::any_of(index.begin(), index.end(), [](double n) { return !(n >= 1.0); }))
      throw ConstructionError("tabulated refractive index must be >= 1");
    DispersionModel m;
    m.kind = DispersionKind::tabulated;
    m.valid_wavelength_um = {wavelengths_um.front(), wavelengths_um.back()};
    m.valid_temperature_c = {temperatures_c.front(), temperatures_c.back()};
    m.table_wavelengths_um = std::move(wavelengths_um);
    m.table_temperatures_c = std::move(temperatures_c);
    m.table_index = std::move(index);
    return m;
  }

  double coefficient(const std::string& name) const {
    const auto it = coefficients.find(name);
    return it == coefficients.end() ? 0.0 : it->second;
  }
};

/// Thermal dilation of the poled structure relative to 25 °C.
struct ThermalExpansion {
  static constexpr double reference_temperature_c = 25.0;
  double alpha = 0.0;  // 1/°C
  double beta = 0.0;   // 1/°C²
  Range valid_temperature_c{};
};

/// f(T) = 1 + α(T − 25) + β(T − 25)².
inline double thermal_scale(const ThermalExpansion& expansion, double temperature_c) {
  if (!expansion.valid_temperature_c.contains(temperature_c))
    throw RangeError("temperature_c", temperature_c, expansion.valid_temperature_c.lo,
                     expansion.valid_temperature_c.hi);
  const double dt = temperature_c - ThermalExpansion::reference_temperature_c;
  return 1.0 + expansion.alpha * dt + expansion.beta * dt * dt;
}

namespace detail {

/// Bracketing node and fraction for linear interpolation on a sorted axis.
inline std::pair<std::size_t, double> locate(const std::vector<double>& nodes, double x) {
  if (nodes.size() == 1) return {0, 0.0};
  x = std::clamp(x, nodes.front(), nodes.back());
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
  if (hi >= nodes.size()) hi = nodes.size() - 1;
  const std::size_t lo = hi - 1;
  if (x == nodes[hi]) return {hi, 0.0};
  return {lo, (x - nodes[lo]) / (nodes[hi] - nodes[lo])};
}

inline double sellmeier_index(const DispersionModel& m, double lambda_um, double temperature_c) {
  const double kelvin = temperature_c + 273.15;
  const double k2 = kelvin * kelvin;
  const double l2 = lambda_um * lambda_um;
  const double c = m.coefficient("C") + m.coefficient("c_T2") * k2;
  const double f = m.coefficient("F");
  const double h = m.coefficient("H");
  double n2 = m.coefficient("A") + (m.coefficient("B") + m.coefficient("b_T2") * k2) / (l2 - c * c) +
              m.coefficient("D") * l2;
  if (const double e = m.coefficient("E"); e != 0.0) n2 += e / (l2 - f * f);
  if (const double g = m.coefficient("G"); g != 0.0) n2 += g / (l2 - h * h);
  if (!(n2 > 0.0)) throw DomainError("Sellmeier expression is non-positive at this wavelength");
  return std::sqrt(n2);
}

inline double tabulated_index(const DispersionModel& m, double lambda_um, double temperature_c) {
  const auto [w, fw] = locate(m.table_wavelengths_um, lambda_um);
  const auto [t, ft] = locate(m.table_temperatures_c, temperature_c);
  const std::size_t nw = m.table_wavelengths_um.size();
  const std::size_t w1 = fw > 0.0 ? w + 1 : w;
  const std::size_t t1 = ft > 0.0 ? t + 1 : t;
  auto at = [&](std::size_t ti, std::size_t wi) { return m.table_index[ti * nw + wi]; };
  const double lower = at(t, w) + fw * (at(t, w1) - at(t, w));
  const double upper = at(t1, w) + fw * (at(t1, w1) - at(t1, w));
  return lower + ft * (upper - lower);
}

}  // namespace detail

/// n at a vacuum wavelength in µm.
inline double refractive_index_at_wavelength(const DispersionModel& model, double lambda_um, double temperature_c) {
  if (!model.valid_wavelength_um.contains(lambda_um))
    throw RangeError("wavelength_um", lambda_um, model.valid_wavelength_um.lo, model.valid_wavelength_um.hi);
  if (!model.valid_temperature_c.contains(temperature_c))
    throw RangeError("temperature_c", temperature_c, model.valid_temperature_c.lo, model.valid_temperature_c.hi);
  switch (model.kind) {
    case DispersionKind::constant:
      return model.coefficient("n");
    case DispersionKind::sellmeier:
      return detail::sellmeier_index(model, lambda_um, temperature_c);
    case DispersionKind::tabulated:
      return detail::tabulated_index(model, lambda_um, temperature_c);
  }
  throw DomainError("unknown dispersion kind");
}

/// n(ω, T) for an angular frequency in rad/s.
inline double refractive_index(const DispersionModel& model, double omega, double temperature_c) {
  if (!(omega > 0.0)) throw DomainError("angular frequency must be positive");
  return refractive_index_at_wavelength(model, wavelength_um_from_omega(omega), temperature_c);
}

/// A nonlinear medium: dispersion plus thermal expansion, as read from a material file.
struct Material {
  std::string name;
  std::string note;
  DispersionModel dispersion;
  ThermalExpansion expansion;
};

/// Parses a material definition (YAML). Recognized keys: name, note, kind,
/// coefficients, valid_wavelength_um, valid_temperature_c, alpha, beta, table.
inline Material parse_material(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, std::string("material file: ") + e.msg);
  }
  detail::require_known_keys(root,
                             {"name", "note", "kind", "coefficients", "valid_wavelength_um", "valid_temperature_c",
                              "alpha", "beta", "table"},
                             "");
  if (!root["kind"]) throw ConfigError("kind", 0, "missing required field");
  Material mat;
  if (root["name"]) mat.name = detail::as_string(root["name"], "name");
  if (root["note"]) mat.note = detail::as_string(root["note"], "note");
  const auto kind = detail::as_string(root["kind"], "kind");

  Range wavelength{}, temperature{};
  if (root["valid_wavelength_um"]) {
    const auto p = detail::as_pair(root["valid_wavelength_um"], "valid_wavelength_um");
    wavelength = {p[0], p[1]};
  }
  if (root["valid_temperature_c"]) {
    const auto p = detail::as_pair(root["valid_temperature_c"], "valid_temperature_c");
    temperature = {p[0], p[1]};
  }

  std::map<std::string, double> coefficients;
  if (const auto c = root["coefficients"]) {
    if (!c.IsMap()) throw ConfigError("coefficients", detail::line_of(c), "expected a mapping of named numbers");
    for (const auto& kv : c) {
      const auto key = kv.first.as<std::string>();
      coefficients[key] = detail::as_double(kv.second, "coefficients." + key);
    }
  }

  try {
    if (kind == "constant") {
      if (!coefficients.count("n")) throw ConfigError("coefficients.n", 0, "constant kind needs coefficient 'n'");
      mat.dispersion = DispersionModel::constant(coefficients.at("n"), wavelength, temperature);
    } else if (kind == "sellmeier-coefficient-set" || kind == "sellmeier") {
      if (!root["valid_wavelength_um"] || !root["valid_temperature_c"])
        throw ConfigError("kind", detail::line_of(root["kind"]), "Sellmeier models need explicit validity ranges");
      mat.dispersion = DispersionModel::sellmeier(coefficients, wavelength, temperature);
    } else if (kind == "tabulated") {
      const auto table = root["table"];
      if (!table) throw ConfigError("table", 0, "tabulated kind needs a 'table' block");
      detail::require_known_keys(table, {"wavelengths_um", "temperatures_c", "n"}, "table");
      auto wl = detail::as_vector(table["wavelengths_um"], "table.wavelengths_um");
      auto tc = detail::as_vector(table["temperatures_c"], "table.temperatures_c");
      std::vector<double> values;
      for (const auto& row : table["n"]) {
        const auto r = detail::as_vector(row, "table.n");
        if (r.size() != wl.size()) throw ConfigError("table.n", detail::line_of(row), "row length mismatch");
        values.insert(values.end(), r.begin(), r.end());
      }
      mat.dispersion = DispersionModel::tabulated(std::move(wl), std::move(tc), std::move(values));
    } else {
      throw ConfigError("kind", detail::line_of(root["kind"]),
                        "expected one of constant, sellmeier-coefficient-set, tabulated");
    }
  } catch (const ConstructionError& e) {
    throw ConfigError("coefficients", detail::line_of(root), e.what());
  }

  if (root["alpha"]) mat.expansion.alpha = detail::as_double(root["alpha"], "alpha");
  if (root["beta"]) mat.expansion.beta = detail::as_double(root["beta"], "beta");
  mat.expansion.valid_temperature_c = mat.dispersion.valid_temperature_c;
  return mat;
}

inline Material load_material(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open material file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_material(buffer.str());
}

/// Non-dispersive medium, used by algorithmic tests.
inline Material constant_material(double n) {
  Material m;
  m.name = "constant";
  m.dispersion = DispersionModel::constant(n);
  return m;
}

}  // namespace cdisim
