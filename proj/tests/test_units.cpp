#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chainshell/error.hpp"
#include "chainshell/units.hpp"
#include "raster_oracle.hpp"

using namespace chainshell;

TEST_SUITE("units") {

TEST_CASE("ratio from the area definition") {
  UnitCell cell{UnitShape::Rectangular, 11.0, 1.0, std::sqrt(550.0)};
  // solid 44 mm^2, gap 506 mm^2
  CHECK(solid_area(cell) == doctest::Approx(44.0));
  CHECK(solid_to_gap_ratio(cell) == doctest::Approx(44.0 / 550.0).epsilon(1e-12));
}

TEST_CASE("zero rod diameter is rejected") {
  UnitCell cell{UnitShape::Rectangular, 11.0, 0.0, 20.0};
  CHECK_THROWS_AS(solid_to_gap_ratio(cell), ParameterError);
  cell.rod_diameter_mm = 12.0;
  CHECK_THROWS_AS(solid_to_gap_ratio(cell), ParameterError);
}

TEST_CASE("calibrated pitch inverts the area model") {
  CHECK(calibrate_pitch(reference_cell(UnitShape::Rectangular), 0.08) ==
        doctest::Approx(std::sqrt(550.0)).epsilon(1e-6));
  CHECK(calibrate_pitch(reference_cell(UnitShape::Triangular), 0.08) ==
        doctest::Approx(std::sqrt(22.5 / 0.08)).epsilon(1e-6));
  CHECK(calibrate_pitch(reference_cell(UnitShape::Circular), 0.08) ==
        doctest::Approx(std::sqrt(11.0 / 0.08)).epsilon(1e-6));
}

TEST_CASE("unreachable targets") {
  CHECK_THROWS_AS(calibrate_pitch(reference_cell(UnitShape::Rectangular), 1.0), InfeasibleError);
  CHECK_THROWS_AS(calibrate_pitch(reference_cell(UnitShape::Rectangular), 0.0), InfeasibleError);
  // A ring packed into its own footprint cannot exceed the ratio at that pitch.
  CHECK_THROWS_AS(calibrate_pitch(reference_cell(UnitShape::Rectangular), 0.5), InfeasibleError);
}

TEST_CASE("calibration round trip over the parameter box") {
  for (const auto shape : {UnitShape::Triangular, UnitShape::Circular, UnitShape::Rectangular}) {
    for (double L = 5.0; L <= 20.0; L += 2.5) {
      for (double d = 0.5; d <= 2.0; d += 0.5) {
        UnitCell cell{shape, L, d, std::nullopt};
        const double extent = footprint_extent(cell);
        if (solid_area(cell) / (extent * extent) < 0.08) {
          CHECK_THROWS_AS(calibrate_pitch(cell, 0.08), InfeasibleError);
          continue;
        }
        cell.pitch_mm = calibrate_pitch(cell, 0.08);
        CHECK(std::abs(solid_to_gap_ratio(cell) - 0.08) < 1e-6);
      }
    }
  }
}

TEST_CASE("ratio decreases with pitch") {
  for (const auto shape : {UnitShape::Triangular, UnitShape::Circular, UnitShape::Rectangular}) {
    UnitCell cell = reference_cell(shape);
    double last = 2.0;
    for (double p = footprint_extent(cell); p < 60.0; p += 0.37) {
      cell.pitch_mm = p;
      const double r = solid_to_gap_ratio(cell);
      CHECK(r < last);
      last = r;
    }
  }
}

TEST_CASE("pitch below the ring footprint is rejected") {
  UnitCell cell = reference_cell(UnitShape::Rectangular);
  cell.pitch_mm = footprint_extent(cell) * 0.99;
  CHECK_THROWS_AS(solid_to_gap_ratio(cell), ParameterError);
}

TEST_CASE("moment of inertia formulas") {
  const double tri = std::sqrt(3.0) / 36.0 * 7.5 * 7.5 * 7.5;
  const double r = 11.0 / (2.0 * std::numbers::pi);
  const double circ = 0.5 * r * r * r;
  const double rect = (11.0 * 1331.0 + 11.0 * 1331.0) / 12.0;
  CHECK(moment_of_inertia(reference_cell(UnitShape::Triangular)) == doctest::Approx(tri));
  CHECK(moment_of_inertia(reference_cell(UnitShape::Circular)) == doctest::Approx(circ));
  CHECK(moment_of_inertia(reference_cell(UnitShape::Rectangular)) == doctest::Approx(rect));
  CHECK(moment_of_inertia(reference_cell(UnitShape::Triangular)) == doctest::Approx(20.30).epsilon(0.005));
  CHECK(moment_of_inertia(reference_cell(UnitShape::Circular)) == doctest::Approx(2.683).epsilon(0.005));
  CHECK(moment_of_inertia(reference_cell(UnitShape::Rectangular)) ==
        doctest::Approx(2440.17).epsilon(0.005));
  CHECK(rect > tri);
  CHECK(tri > circ);
}

TEST_CASE("sheet weight") {
  SheetSpec sheet;
  sheet.unit = reference_cell(UnitShape::Rectangular);
  sheet.grid_rows = 0;
  CHECK(sheet_weight(sheet) == 0.0);

  sheet.grid_rows = 3;
  sheet.grid_cols = 3;
  const double hand = 9 * 44.0 * std::numbers::pi * 0.25 * 1.38e-3;
  CHECK(sheet_weight(sheet) == doctest::Approx(hand).epsilon(1e-12));
  CHECK(sheet_weight(sheet) == doctest::Approx(0.429).epsilon(0.002));

  SheetSpec bigger = sheet;
  bigger.grid_rows = 6;
  CHECK(sheet_weight(bigger) == doctest::Approx(2.0 * sheet_weight(sheet)));
  bigger.density_g_per_cm3 *= 3.0;
  CHECK(sheet_weight(bigger) == doctest::Approx(6.0 * sheet_weight(sheet)));
}

TEST_CASE("shape names") {
  CHECK(parse_shape("tri") == UnitShape::Triangular);
  CHECK(parse_shape("circular") == UnitShape::Circular);
  CHECK(parse_shape("rect") == UnitShape::Rectangular);
  CHECK_THROWS_AS(parse_shape("hex"), ParameterError);
}

TEST_CASE("ratio agrees with a 2048 x 2048 rasterization") {
  for (const auto shape : {UnitShape::Triangular, UnitShape::Circular, UnitShape::Rectangular}) {
    UnitCell cell = reference_cell(shape);
    cell.pitch_mm = calibrate_pitch(cell, 0.08);
    const double raster = oracle::raster_ratio(cell, 2048);
    CAPTURE(shape_name(shape));
    CHECK(std::abs(raster - solid_to_gap_ratio(cell)) < 0.005);
  }
}

}
