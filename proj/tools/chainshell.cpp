// chainshell: command-line front end for the shell design pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "chainshell/config.hpp"
#include "chainshell/error.hpp"
#include "chainshell/kernels.hpp"
#include "chainshell/loads.hpp"
#include "chainshell/pipeline.hpp"
#include "chainshell/rng.hpp"

namespace fs = std::filesystem;
using namespace chainshell;

namespace {

constexpr int kValidationError = 2;
constexpr int kStageFailure = 3;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  int threads = 0;
};

PipelineConfig load(const Globals& g) {
  PipelineConfig config = g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
  if (g.seed) config.seed = *g.seed;
  config.validate();
  return config;
}

void print_file(const fs::path& path) {
  std::ifstream in(path);
  std::cout << in.rdbuf();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generative design toolkit for vacuum-sealed chainmail shells"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Top-level seed (overrides run.seed)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "OpenMP threads (0 keeps the runtime default)")
      ->check(CLI::NonNegativeNumber);

  auto* units = app.add_subcommand("units", "Calibrate ring pitch and tabulate unit-cell constants");
  auto* sweep = app.add_subcommand("sweep2d", "Amplitude x frequency sweep against the envelopes");
  auto* gen3d = app.add_subcommand("gen3d", "Generate seeded 3D surface iterations per group");
  auto* filter = app.add_subcommand("filter", "Keep geometrically distinct surfaces per group");
  std::string filter_in;
  filter->add_option("--in", filter_in, "gen3d manifest.csv")->required()->check(CLI::ExistingFile);

  auto* loads = app.add_subcommand("loads", "Load case for a surface area");
  double area = 4.0;
  std::optional<double> thickness;
  loads->add_option("--area", area, "Shell surface area (m^2)");
  loads->add_option("--thickness", thickness, "Shell thickness (m), overrides loads.thickness_m");

  auto* analyze = app.add_subcommand("analyze", "Frame analysis of selected surfaces");
  std::string analyze_in, supports_path;
  analyze->add_option("--in", analyze_in, "selected.csv")->required()->check(CLI::ExistingFile);
  analyze->add_option("--supports", supports_path, "Support layout file")->check(CLI::ExistingFile);

  auto* opt = app.add_subcommand("optimize", "Shelter anchor/column optimisation");
  auto* run = app.add_subcommand("run", "Full pipeline into --out");
  auto* report = app.add_subcommand("report", "Summarise a run directory");
  std::string report_in;
  report->add_option("--in", report_in, "Run directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationError;
  }

  try {
    const PipelineConfig config = load(g);
    if (g.threads > 0) set_thread_count(g.threads);
    const fs::path out = g.out;

    if (*units) {
      stage_units(config, out);
      print_file(out / "units.csv");
    } else if (*sweep) {
      stage_sweep2d(config, out);
      print_file(out / "sweep_maxima.csv");
    } else if (*gen3d) {
      const auto rows = stage_gen3d(config, config.seed, out);
      fmt::print("{} surfaces written to {}\n", rows.size(), out.string());
    } else if (*filter) {
      const auto rows = stage_filter(config, read_surface_csv(filter_in), out);
      fmt::print("{} surfaces kept, see {}\n", rows.size(), (out / "selected.csv").string());
    } else if (*loads) {
      StructureSpec spec = config.loads.structure;
      if (thickness) spec.thickness_m = *thickness;
      spec.validate();
      const LoadCase lc = load_case(spec, area, config.loads.snow_shape, config.loads.wind_shape);
      fmt::print("DL_kN,LL_kN,SL_kN,WL_kN,TL_kN,deflection_limit_mm\n");
      fmt::print("{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", lc.dead_kN, lc.live_kN, lc.snow_kN,
                 lc.wind_kN, lc.total_kN, deflection_limit_mm(spec.span_m));
    } else if (*analyze) {
      const double span = config.loads.structure.span_m;
      const SupportLayout supports = supports_path.empty()
                                         ? default_supports(config.fem, span)
                                         : load_supports(supports_path, span, config.fem.grid);
      stage_analyze(config, read_surface_csv(analyze_in), supports, out);
      print_file(out / "displacements.csv");
    } else if (*opt) {
      stage_optimize(config, derive_seed(config.seed, "optimize"), out);
      print_file(out / "optimize_summary.csv");
    } else if (*run) {
      run_pipeline(config, out);
      write_report(std::cout, out);
    } else if (*report) {
      write_report(std::cout, report_in);
    }
  } catch (const StageError& e) {
    fmt::print(stderr, "stage failed: {}\n", e.what());
    return kStageFailure;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "invalid configuration: {}\n", e.what());
    return kValidationError;
  } catch (const ParameterError& e) {
    fmt::print(stderr, "invalid parameter: {}\n", e.what());
    return kValidationError;
  } catch (const EnvelopeError& e) {
    fmt::print(stderr, "invalid parameter: {}\n", e.what());
    return kValidationError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "stage failed: {}\n", e.what());
    return kStageFailure;
  }
  return 0;
}
