#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "cdisim/cdisim.hpp"

namespace {

void print_presets() {
  std::cout << "gratings:\n";
  for (const auto& p : cdisim::kGratingPresets)
    std::cout << "  " << p.name << "  b1_um=" << p.b1_um << " zeta_per_um=" << p.zeta_per_um
              << " n_periods=" << p.n_periods << "\n";
  std::cout << "detectors:\n";
  for (const auto& name : cdisim::detector_preset_names()) {
    const auto d = cdisim::detector_preset(name);
    std::cout << "  " << name << "  qe_support_nm=[" << d.qe.support_lo_nm << ", " << d.qe.support_hi_nm
              << "] dark_rate_per_s=" << d.dark_rate << "\n";
  }
  std::cout << "sources:\n"
            << "  spdc    down-converted spectrum of the configured grating\n"
            << "  sld930  gaussian_sld center_nm=930 fwhm_nm=70\n";
}

int run_command(const std::filesystem::path& config_path, const cdisim::ConfigOverrides& overrides) {
  cdisim::RunConfig config;
  try {
    config = cdisim::load_config(config_path, overrides);
  } catch (const cdisim::Error& e) {
    std::cerr << "cdisim: " << config_path.string() << ": " << e.what() << "\n";
    if (overrides.output_dir) {
      std::filesystem::create_directories(*overrides.output_dir);
      const nlohmann::json manifest = {{"tool", "cdisim"},
                                       {"version", cdisim::kVersion},
                                       {"status", "failed"},
                                       {"error", e.what()},
                                       {"outputs", nlohmann::json::array()}};
      cdisim::write_file_atomic(*overrides.output_dir / "manifest.json", manifest.dump(2) + "\n");
    }
    return 2;
  }
  const auto result = cdisim::run(config);
  for (const auto& w : result.manifest["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  if (result.exit_code != 0) {
    std::cerr << "cdisim: " << result.manifest["error"].get<std::string>() << "\n";
    return result.exit_code;
  }
  for (const auto& o : result.manifest["outputs"])
    std::cout << (config.output_dir / o["file"].get<std::string>()).string() << "  " << o["sha256"].get<std::string>()
              << "\n";
  std::cout << (config.output_dir / "manifest.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chirped-grating SPDC and photon-counting coherence-domain imaging simulator"};
  app.set_version_flag("--version", std::string(cdisim::kVersion));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute the experiment described by a configuration file");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  run->add_option("config", config_path, "Run configuration (YAML)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_option("--seed", seed, "Random seed (overrides seed)");
  run->add_option("--threads", threads, "Worker threads (overrides threads; 0 = automatic)");

  app.add_subcommand("presets", "List built-in gratings, detectors and sources");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cdisim::ConfigOverrides overrides;
      overrides.seed = seed;
      if (out_dir) overrides.output_dir = std::filesystem::path(*out_dir);
      overrides.threads = threads;
      return run_command(config_path, overrides);
    }
    print_presets();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "cdisim: " << e.what() << "\n";
    return 1;
  }
}
