#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace chainshell {

enum class UnitShape { Triangular, Circular, Rectangular };

/// Accepts "tri", "triangular", "circ", "circular", "rect", "rectangular".
UnitShape parse_shape(std::string_view name);
std::string_view shape_name(UnitShape shape);
std::string_view shape_short_name(UnitShape shape);

/// One chainmail ring within its square tiling cell. Lengths in millimetres.
///
/// member_length is the triangle side, the circle circumference, or the square
/// side (b = L for rectangular rings).
struct UnitCell {
  UnitShape shape = UnitShape::Rectangular;
  double member_length_mm = 11.0;
  double rod_diameter_mm = 1.0;
  std::optional<double> pitch_mm;

  /// Throws ParameterError when d <= 0 or L <= d.
  void validate() const;
};

/// Length of the closed centreline loop of one ring.
double centreline_length(const UnitCell& cell);

/// Projected solid area of one ring: centreline length times rod diameter.
double solid_area(const UnitCell& cell);

/// Side of the smallest square that holds the ring's projected footprint.
/// Pitches below this are rejected.
double footprint_extent(const UnitCell& cell);

/// V_s / (V_s + V_g) for the cell at its pitch.
double solid_to_gap_ratio(const UnitCell& cell);

/// Pitch at which solid_to_gap_ratio hits target_ratio (within 1e-6),
/// found by bisection. Throws InfeasibleError when the ring cannot reach it.
double calibrate_pitch(const UnitCell& cell, double target_ratio);

/// Section constant per unit shape, evaluated as written:
///   triangular   sqrt(3)/36 L^3 d
///   circular     1/2 R^3 d^2, R = L / 2pi   (mm^5, dimensionally off)
///   rectangular  1/12 (L b^3 + b L^3) d
double moment_of_inertia(const UnitCell& cell);

struct SheetSpec {
  UnitCell unit;
  int grid_rows = 3;
  int grid_cols = 3;
  double density_g_per_cm3 = 1.38;
};

/// Solid volume of one ring (centreline length times rod cross-section), mm^3.
double unit_volume_mm3(const UnitCell& cell);

/// Estimated sheet mass in grams. Only the ordering across shapes is
/// meaningful; absolute values depend on the volume model.
double sheet_weight(const SheetSpec& spec);

/// Default ring dimensions used by the reference samples (L, d = 1 mm).
UnitCell reference_cell(UnitShape shape);

}  // namespace chainshell
