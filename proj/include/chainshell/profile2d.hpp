#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainshell/units.hpp"

namespace chainshell {

/// A sinusoidal section y(x) = A sin(2 pi f x / L) at real-world scale.
struct SectionProfile {
  double amplitude_mm = 0.0;
  int frequency = 3;  ///< grid divisions over the span
  double span_mm = 2000.0;
  double model_scale = 20.0;  ///< 1:model_scale, metadata only

  void validate() const;
};

double profile_height(double x_mm, const SectionProfile& p);

/// |y''| / (1 + y'^2)^(3/2), derivatives taken analytically.
double profile_curvature(double x_mm, const SectionProfile& p);

/// Curvature at the sine crest, A (2 pi f / L)^2.
double peak_curvature(const SectionProfile& p);

/// Per-shape table of the largest amplitude a section tolerates at each
/// frequency.
struct FeasibilityEnvelope {
  UnitShape shape = UnitShape::Rectangular;
  std::map<int, double> max_amplitude_mm;

  bool covers(int frequency) const { return max_amplitude_mm.count(frequency) != 0; }
  /// Throws EnvelopeError for frequencies the table does not list.
  double max_amplitude(int frequency) const;
  bool feasible(double amplitude_mm, int frequency) const;
};

using EnvelopeSet = std::map<UnitShape, FeasibilityEnvelope>;

/// Parses "shape f max_A_mm" lines (whitespace or comma separated, '#' comments).
EnvelopeSet parse_envelopes(std::istream& in);
EnvelopeSet load_envelopes(const std::string& path);
void write_envelopes(std::ostream& out, const EnvelopeSet& set);

/// Tabulated outcome of the physical bend tests. The rectangular system peaks
/// at (35 mm, f = 9); triangular and circular peak strictly lower.
const EnvelopeSet& default_envelopes();

struct SweepOptions {
  double amplitude_step_mm = 5.0;
  double amplitude_max_mm = 40.0;
  int frequency_min = 3;
  int frequency_max = 10;
  double span_mm = 2000.0;
};

struct SweepCell {
  double amplitude_mm = 0.0;
  int frequency = 0;
  bool feasible = false;
  double peak_curvature_per_mm = 0.0;
};

struct AmplitudeFrequency {
  double amplitude_mm = 0.0;
  int frequency = 0;
  friend bool operator==(const AmplitudeFrequency&, const AmplitudeFrequency&) = default;
};

struct SweepReport {
  UnitShape shape = UnitShape::Rectangular;
  int amplitude_rows = 0;
  int frequency_cols = 0;
  std::vector<SweepCell> cells;  ///< row-major: amplitude ascending, then frequency
  /// Feasible cell with the largest amplitude, ties broken by frequency.
  std::optional<AmplitudeFrequency> maximal;

  const SweepCell& at(int amplitude_row, int frequency_col) const {
    return cells[static_cast<std::size_t>(amplitude_row * frequency_cols + frequency_col)];
  }
};

/// Full Cartesian amplitude x frequency sweep filtered by the envelope.
SweepReport sweep_2d(UnitShape shape, const FeasibilityEnvelope& envelope,
                     const SweepOptions& options = {});

void write_sweep_csv(std::ostream& out, const SweepReport& report, bool header = true);

}  // namespace chainshell
