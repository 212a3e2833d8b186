#include "chainshell/units.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "chainshell/error.hpp"

namespace chainshell {

UnitShape parse_shape(std::string_view name) {
  if (name == "tri" || name == "triangular") return UnitShape::Triangular;
  if (name == "circ" || name == "circular") return UnitShape::Circular;
  if (name == "rect" || name == "rectangular") return UnitShape::Rectangular;
  throw ParameterError(fmt::format("unknown unit shape '{}'", name));
}

std::string_view shape_name(UnitShape shape) {
  switch (shape) {
    case UnitShape::Triangular: return "triangular";
    case UnitShape::Circular: return "circular";
    case UnitShape::Rectangular: return "rectangular";
  }
  return "?";
}

std::string_view shape_short_name(UnitShape shape) {
  switch (shape) {
    case UnitShape::Triangular: return "tri";
    case UnitShape::Circular: return "circ";
    case UnitShape::Rectangular: return "rect";
  }
  return "?";
}

void UnitCell::validate() const {
  if (!(rod_diameter_mm > 0.0)) {
    throw ParameterError(fmt::format("rod diameter must be positive, got {}", rod_diameter_mm));
  }
  if (!(member_length_mm > rod_diameter_mm)) {
    throw ParameterError(fmt::format("member length {} must exceed rod diameter {}",
                                     member_length_mm, rod_diameter_mm));
  }
}

double centreline_length(const UnitCell& cell) {
  switch (cell.shape) {
    case UnitShape::Triangular: return 3.0 * cell.member_length_mm;
    case UnitShape::Circular: return cell.member_length_mm;
    case UnitShape::Rectangular: return 4.0 * cell.member_length_mm;
  }
  return 0.0;
}

double solid_area(const UnitCell& cell) { return centreline_length(cell) * cell.rod_diameter_mm; }

double footprint_extent(const UnitCell& cell) {
  const double d = cell.rod_diameter_mm;
  const double l = cell.member_length_mm;
  switch (cell.shape) {
    // mitred outer edge sits d/2 outside each side: side grows by d*sqrt(3)
    case UnitShape::Triangular: return l + d * std::numbers::sqrt3;
    case UnitShape::Circular: return l / std::numbers::pi + d;
    case UnitShape::Rectangular: return l + d;
  }
  return 0.0;
}

namespace {

double ratio_at(double solid, double pitch) { return solid / (pitch * pitch); }

}  // namespace

double solid_to_gap_ratio(const UnitCell& cell) {
  cell.validate();
  if (!cell.pitch_mm || !(*cell.pitch_mm > 0.0)) {
    throw ParameterError("cell pitch must be set and positive");
  }
  const double pitch = *cell.pitch_mm;
  if (pitch < footprint_extent(cell)) {
    throw ParameterError(fmt::format("pitch {} mm is smaller than the ring footprint {} mm", pitch,
                                     footprint_extent(cell)));
  }
  const double solid = solid_area(cell);
  const double gap = pitch * pitch - solid;
  return solid / (solid + gap);
}

double calibrate_pitch(const UnitCell& cell, double target_ratio) {
  cell.validate();
  if (!(target_ratio > 0.0 && target_ratio < 1.0)) {
    throw InfeasibleError(fmt::format("target ratio {} outside (0, 1)", target_ratio));
  }
  const double solid = solid_area(cell);
  double lo = footprint_extent(cell);
  if (ratio_at(solid, lo) < target_ratio) {
    throw InfeasibleError(fmt::format(
        "{} ring L={} d={} reaches at most ratio {:.4f} < target {}", shape_name(cell.shape),
        cell.member_length_mm, cell.rod_diameter_mm, ratio_at(solid, lo), target_ratio));
  }
  double hi = 2.0 * lo;
  while (ratio_at(solid, hi) > target_ratio) hi *= 2.0;

  // ratio strictly decreases with pitch
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (ratio_at(solid, mid) > target_ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double moment_of_inertia(const UnitCell& cell) {
  cell.validate();
  const double l = cell.member_length_mm;
  const double d = cell.rod_diameter_mm;
  switch (cell.shape) {
    case UnitShape::Triangular: return std::numbers::sqrt3 / 36.0 * l * l * l * d;
    case UnitShape::Circular: {
      const double r = l / (2.0 * std::numbers::pi);
      return 0.5 * r * r * r * d * d;
    }
    case UnitShape::Rectangular: {
      const double b = l;
      return (l * b * b * b + b * l * l * l) * d / 12.0;
    }
  }
  return 0.0;
}

double unit_volume_mm3(const UnitCell& cell) {
  const double r = 0.5 * cell.rod_diameter_mm;
  return centreline_length(cell) * std::numbers::pi * r * r;
}

double sheet_weight(const SheetSpec& spec) {
  if (spec.grid_rows < 0 || spec.grid_cols < 0) {
    throw ParameterError("sheet grid dimensions must be non-negative");
  }
  if (spec.grid_rows == 0 || spec.grid_cols == 0) return 0.0;
  spec.unit.validate();
  constexpr double kCm3PerMm3 = 1e-3;
  return static_cast<double>(spec.grid_rows) * spec.grid_cols * unit_volume_mm3(spec.unit) *
         spec.density_g_per_cm3 * kCm3PerMm3;
}

UnitCell reference_cell(UnitShape shape) {
  UnitCell cell;
  cell.shape = shape;
  cell.rod_diameter_mm = 1.0;
  cell.member_length_mm = shape == UnitShape::Triangular ? 7.5 : 11.0;
  return cell;
}

}  // namespace chainshell
