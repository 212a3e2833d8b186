#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chainshell/config.hpp"
#include "chainshell/error.hpp"
#include "chainshell/filter.hpp"
#include "chainshell/optimizer.hpp"
#include "chainshell/shell3d.hpp"

namespace chainshell {

/// A stage failed; `stage()` names it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause)
      : Error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// One generated surface, enough to regenerate it bit-for-bit.
struct SurfaceRecord {
  int group = 0;
  int iteration = 0;
  std::uint64_t seed = 0;
  double amplitude_mm = 0.0;
  int frequency = 0;
  int control_divisions = 0;
  double min_z_m = 0.0;
  double max_z_m = 0.0;
  SurfaceMetrics metrics;
  double delta_p_m = 0.0;  ///< filter tolerance, selected rows only
  double delta_a_m2 = 0.0;
};

struct AnalysisRecord {
  int model_id = 0;
  SurfaceRecord surface;
  LoadCase load;
  double max_displacement_mm = 0.0;
  double limit_mm = 0.0;
  bool pass = false;
};

/// Seed used for the gen3d pool of one group.
std::uint64_t group_seed(std::uint64_t seed, int group);

ShellSurface regenerate(const SurfaceRecord& record, const PipelineConfig& config);
const FeasibilityEnvelope& gen3d_envelope(const PipelineConfig& config);

// Stages. Each writes only inside `dir` and returns what the next stage needs.
void stage_units(const PipelineConfig& config, const std::filesystem::path& dir);
void stage_sweep2d(const PipelineConfig& config, const std::filesystem::path& dir);
std::vector<SurfaceRecord> stage_gen3d(const PipelineConfig& config, std::uint64_t seed,
                                       const std::filesystem::path& dir);
std::vector<SurfaceRecord> stage_filter(const PipelineConfig& config,
                                        const std::vector<SurfaceRecord>& pool,
                                        const std::filesystem::path& dir);
std::vector<AnalysisRecord> stage_analyze(const PipelineConfig& config,
                                          const std::vector<SurfaceRecord>& selected,
                                          const SupportLayout& supports,
                                          const std::filesystem::path& dir);
OptimizationReport stage_optimize(const PipelineConfig& config, std::uint64_t seed,
                                  const std::filesystem::path& dir);

// CSV round trips for the surface tables (gen3d manifest.csv, filter selected.csv).
void write_surface_csv(std::ostream& out, const std::vector<SurfaceRecord>& rows);
std::vector<SurfaceRecord> read_surface_csv(std::istream& in);
std::vector<SurfaceRecord> read_surface_csv(const std::filesystem::path& path);

void write_displacements_csv(std::ostream& out, const std::vector<AnalysisRecord>& rows);

/// Runs every stage under `out` (one subdirectory each) and writes `manifest`
/// and the rendered `config.ini`. A failing stage marks the manifest
/// incomplete and rethrows as StageError.
void run_pipeline(const PipelineConfig& config, const std::filesystem::path& out);

/// Plain-text summary of a run directory (or any directory holding stage CSVs).
void write_report(std::ostream& out, const std::filesystem::path& run_dir);

}  // namespace chainshell
