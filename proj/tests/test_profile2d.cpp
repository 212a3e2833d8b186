#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "chainshell/error.hpp"
#include "chainshell/profile2d.hpp"

using namespace chainshell;

TEST_SUITE("profile2d") {

TEST_CASE("height at a quarter period") {
  SectionProfile p{10.0, 4, 2000.0};
  CHECK(profile_height(125.0, p) == doctest::Approx(10.0));
  CHECK(std::abs(profile_height(0.0, p)) < 1e-12);
  CHECK(std::abs(profile_height(2000.0, p)) < 1e-9);
}

TEST_CASE("frequency below three is rejected") {
  SectionProfile p{10.0, 2, 2000.0};
  CHECK_THROWS_AS(profile_height(0.0, p), ParameterError);
}

TEST_CASE("x outside the span is rejected") {
  SectionProfile p{10.0, 4, 2000.0};
  CHECK_THROWS_AS(profile_height(-1.0, p), ParameterError);
  CHECK_THROWS_AS(profile_height(2000.5, p), ParameterError);
}

TEST_CASE("curvature matches a finite difference") {
  for (int f = 3; f <= 10; ++f) {
    SectionProfile p{25.0, f, 2000.0};
    for (double x = 10.0; x < 1990.0; x += 37.3) {
      const double h = 1e-2;
      const double y0 = profile_height(x - h, p), y1 = profile_height(x, p),
                   y2 = profile_height(x + h, p);
      const double d1 = (y2 - y0) / (2 * h);
      const double d2 = (y2 - 2 * y1 + y0) / (h * h);
      const double fd = std::abs(d2) / std::pow(1 + d1 * d1, 1.5);
      CHECK(profile_curvature(x, p) == doctest::Approx(fd).epsilon(1e-4).scale(1e-7));
    }
  }
}

TEST_CASE("profile is periodic over one wavelength") {
  SectionProfile p{30.0, 5, 2000.0};
  const double lambda = 2000.0 / 5;
  for (double x = 0.0; x + lambda <= 2000.0; x += 53.0) {
    CHECK(profile_height(x, p) == doctest::Approx(profile_height(x + lambda, p)).scale(1.0));
  }
}

TEST_CASE("peak curvature equals the crest curvature") {
  SectionProfile p{35.0, 9, 2000.0};
  const double crest = 2000.0 / (4.0 * 9);
  CHECK(profile_curvature(crest, p) == doctest::Approx(peak_curvature(p)));
}

TEST_CASE("default envelope maxima") {
  const auto& set = default_envelopes();
  const auto rect = sweep_2d(UnitShape::Rectangular, set.at(UnitShape::Rectangular));
  const auto tri = sweep_2d(UnitShape::Triangular, set.at(UnitShape::Triangular));
  const auto circ = sweep_2d(UnitShape::Circular, set.at(UnitShape::Circular));
  REQUIRE(rect.maximal);
  CHECK(*rect.maximal == AmplitudeFrequency{35.0, 9});
  REQUIRE(tri.maximal);
  REQUIRE(circ.maximal);
  CHECK(tri.maximal->amplitude_mm < 35.0);
  CHECK(circ.maximal->amplitude_mm < 35.0);
}

TEST_CASE("sweep dimensions and the zero amplitude row") {
  const auto& env = default_envelopes().at(UnitShape::Triangular);
  const auto r = sweep_2d(UnitShape::Triangular, env);
  CHECK(r.amplitude_rows == 9);
  CHECK(r.frequency_cols == 8);
  CHECK(r.cells.size() == 72);
  for (int c = 0; c < r.frequency_cols; ++c) {
    CHECK(r.at(0, c).feasible);
    CHECK(r.at(0, c).peak_curvature_per_mm == 0.0);
  }
}

TEST_CASE("feasible set is closed downward in amplitude") {
  for (const auto& [shape, env] : default_envelopes()) {
    const auto r = sweep_2d(shape, env);
    for (int c = 0; c < r.frequency_cols; ++c) {
      for (int a = 1; a < r.amplitude_rows; ++a) {
        if (r.at(a, c).feasible) CHECK(r.at(a - 1, c).feasible);
      }
    }
  }
}

TEST_CASE("all-zero envelope keeps only the zero row") {
  FeasibilityEnvelope env{UnitShape::Circular, {}};
  for (int f = 3; f <= 10; ++f) env.max_amplitude_mm[f] = 0.0;
  const auto r = sweep_2d(UnitShape::Circular, env);
  for (int a = 0; a < r.amplitude_rows; ++a) {
    for (int c = 0; c < r.frequency_cols; ++c) CHECK(r.at(a, c).feasible == (a == 0));
  }
  REQUIRE(r.maximal);
  CHECK(r.maximal->amplitude_mm == 0.0);
}

TEST_CASE("sweep outside the envelope table") {
  FeasibilityEnvelope env{UnitShape::Circular, {{3, 10.0}}};
  CHECK_THROWS_AS(sweep_2d(UnitShape::Circular, env), EnvelopeError);
  CHECK_THROWS_AS(env.feasible(5.0, 4), EnvelopeError);
}

TEST_CASE("envelope text round trip") {
  std::stringstream buf;
  write_envelopes(buf, default_envelopes());
  const auto back = parse_envelopes(buf);
  CHECK(back.size() == 3);
  for (const auto& [shape, env] : default_envelopes()) {
    CHECK(back.at(shape).max_amplitude_mm == env.max_amplitude_mm);
  }
}

TEST_CASE("malformed envelope lines") {
  std::istringstream a("rect 3\n");
  CHECK_THROWS_AS(parse_envelopes(a), ConfigError);
  std::istringstream b("hex 3 10\n");
  CHECK_THROWS_AS(parse_envelopes(b), ConfigError);
  std::istringstream c("rect 3.5 10\n");
  CHECK_THROWS_AS(parse_envelopes(c), ConfigError);
  std::istringstream d("rect,3,10 # comment\n\n");
  CHECK(parse_envelopes(d).at(UnitShape::Rectangular).max_amplitude(3) == 10.0);
}

TEST_CASE("sweep csv has one row per cell") {
  const auto r = sweep_2d(UnitShape::Rectangular, default_envelopes().at(UnitShape::Rectangular));
  std::ostringstream out;
  write_sweep_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 73);
}

}
