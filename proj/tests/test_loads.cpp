#include <doctest.h>

#include "chainshell/error.hpp"
#include "chainshell/loads.hpp"

using namespace chainshell;

TEST_SUITE("loads") {

TEST_CASE("default 2 m x 2 m case") {
  const StructureSpec spec;
  const LoadCase lc = load_case(spec, 4.0);
  CHECK(lc.dead_kN == doctest::Approx(0.10));
  CHECK(lc.live_kN == doctest::Approx(1.60));
  CHECK(lc.snow_kN == doctest::Approx(2.88));
  CHECK(lc.wind_kN == doctest::Approx(3.21));
  CHECK(lc.total_kN == doctest::Approx(7.79));
  CHECK(lc.total_kN == lc.dead_kN + lc.live_kN + lc.snow_kN + lc.wind_kN);
  CHECK(deflection_limit_mm(2.0) == doctest::Approx(8.0));
}

TEST_CASE("dead load grows with surface area, the rest follow plan area") {
  const StructureSpec spec;
  const LoadCase flat = load_case(spec, 4.0);
  const LoadCase curved = load_case(spec, 4.4);
  CHECK(curved.dead_kN == doctest::Approx(1.1 * flat.dead_kN));
  CHECK(curved.live_kN == flat.live_kN);
  CHECK(curved.snow_kN == flat.snow_kN);
  CHECK(curved.wind_kN == flat.wind_kN);
}

TEST_CASE("shape factors") {
  const StructureSpec spec;
  CHECK(snow_load(spec, 1.0) == doctest::Approx(3.6));
  CHECK(wind_load(spec, 1.0) == doctest::Approx(4.28));
  CHECK_THROWS_AS(snow_load(spec, 0.0), ParameterError);
  CHECK_THROWS_AS(snow_load(spec, 1.2), ParameterError);
  CHECK_THROWS_AS(wind_load(spec, -0.1), ParameterError);
}

TEST_CASE("invalid inputs") {
  StructureSpec spec;
  CHECK_THROWS_AS(dead_load(spec, 3.0), ParameterError);
  spec.thickness_m = 0.0;
  CHECK_THROWS_AS(load_case(spec, 4.0), ParameterError);
  CHECK_THROWS_AS(deflection_limit_mm(0.0), ParameterError);
}

}
