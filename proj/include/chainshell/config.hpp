#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chainshell/fem.hpp"
#include "chainshell/loads.hpp"
#include "chainshell/optimizer.hpp"
#include "chainshell/profile2d.hpp"
#include "chainshell/units.hpp"

namespace chainshell {

struct UnitsConfig {
  double target_ratio = 0.08;
  double density_g_per_cm3 = 1.38;
  int grid_rows = 3;
  int grid_cols = 3;
};

struct Gen3dConfig {
  UnitShape shape = UnitShape::Rectangular;  ///< envelope used to admit (A, f)
  std::vector<int> groups{1, 2, 3, 4};
  int iterations = 20;
  int resolution = 64;
  int control_divisions = 0;  ///< 0 selects 8 f
  double offset_divisor = 5.0;
  double span_mm = 2000.0;
  int depth_resolution = 256;
};

enum class ToleranceMode { Auto, Fixed };

struct FilterConfig {
  int keep = 4;
  ToleranceMode mode = ToleranceMode::Auto;
  int max_halvings = 16;
  double delta_p = 0.0;  ///< metres, fixed mode
  double delta_a = 0.0;  ///< square metres, fixed mode
};

struct LoadsConfig {
  StructureSpec structure;
  double snow_shape = kDefaultSnowShape;
  double wind_shape = kDefaultWindShape;
  double precompression_N = 1.0;
};

enum class SupportPreset { Corners, Perimeter };

struct FemConfig {
  Material material;
  int grid = 20;
  SupportPreset supports = SupportPreset::Perimeter;
  SupportKind support_kind = SupportKind::Fixed;
};

struct PipelineConfig {
  std::uint64_t seed = 7;
  UnitsConfig units;
  SweepOptions sweep;
  std::string envelope_file;  ///< empty selects the built-in table
  Gen3dConfig gen3d;
  FilterConfig filter;
  LoadsConfig loads;
  FemConfig fem;
  ShelterOptions optimizer;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// INI text: [section] headers and key = value lines. Unknown sections or
/// keys, malformed numbers and invalid values raise ConfigError naming the key.
PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::filesystem::path& path);

/// Canonical INI rendering of every field; parse_config(render_config(c)) == c.
std::string render_config(const PipelineConfig& config);

/// FNV-1a of the canonical rendering.
std::uint64_t config_hash(const PipelineConfig& config);

std::string_view support_kind_name(SupportKind kind);
SupportKind parse_support_kind(std::string_view text);

/// Support file: one directive per line, '#' comments.
///   corners <fixed|pinned|sliding>
///   perimeter <fixed|pinned|sliding>
///   point <x_m> <y_m> <kind>
///   column <x_m> <y_m> <side_m> <load_bearing|formwork>
SupportLayout parse_supports(std::istream& in, double span_m, int grid);
SupportLayout load_supports(const std::filesystem::path& path, double span_m, int grid);
SupportLayout default_supports(const FemConfig& fem, double span_m);

}  // namespace chainshell
