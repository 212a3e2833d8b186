#include <doctest.h>

#include <cmath>
#include <sstream>

#include "chainshell/error.hpp"
#include "chainshell/filter.hpp"
#include "chainshell/kernels.hpp"
#include "chainshell/shell3d.hpp"

using namespace chainshell;

namespace {

const FeasibilityEnvelope& rect() { return default_envelopes().at(UnitShape::Rectangular); }

struct ThreadGuard {
  int saved = thread_count();
  ~ThreadGuard() { set_thread_count(saved); }
};

}  // namespace

TEST_SUITE("shell3d") {

TEST_CASE("group parameters") {
  CHECK(group_params(1).amplitude_mm == 10.0);
  CHECK(group_params(1).frequency == 3);
  CHECK(group_params(4).amplitude_mm == 25.0);
  CHECK(group_params(4).frequency == 6);
}

TEST_CASE("offsets stay inside [0, A/5] and the boundary keeps the base field") {
  GenerationSpec spec{25.0, 6, 20, 42};
  const auto grids = generate_iterations(spec, rect());
  REQUIRE(grids.size() == 20);
  const ControlGrid base = field_control_grid(25.0, 6, default_control_divisions(6));
  const int F = base.divisions;
  for (const auto& g : grids) {
    CHECK(g.divisions == F);
    for (int i = 0; i <= F; ++i) {
      for (int j = 0; j <= F; ++j) {
        const bool corner = (i == 0 || i == F) && (j == 0 || j == F);
        const bool boundary = i == 0 || j == 0 || i == F || j == F;
        const double dz = g.z_mm(i, j) - base.z_mm(i, j);
        if (corner) {
          CHECK(g.z_mm(i, j) == 0.0);
        } else if (boundary) {
          CHECK(dz == 0.0);
        } else {
          CHECK(dz >= 0.0);
          CHECK(dz <= 5.0);
        }
      }
    }
  }
}

TEST_CASE("iterations differ from one another") {
  GenerationSpec spec{25.0, 6, 4, 42};
  const auto grids = generate_iterations(spec, rect());
  CHECK(grids[0].z_mm != grids[1].z_mm);
  CHECK(grids[2].z_mm != grids[3].z_mm);
}

TEST_CASE("outside the envelope") {
  GenerationSpec spec{40.0, 6, 2, 1};
  CHECK_THROWS_AS(generate_iterations(spec, rect()), EnvelopeError);
  spec.amplitude_mm = 10.0;
  spec.frequency = 12;
  CHECK_THROWS_AS(generate_iterations(spec, rect()), EnvelopeError);
}

TEST_CASE("generation is deterministic and thread-count invariant") {
  ThreadGuard guard;
  GenerationSpec spec{20.0, 5, 12, 99};
  set_thread_count(1);
  const auto one = generate_iterations(spec, rect());
  const ShellSurface s1(one[7], 64);
  set_thread_count(4);
  const auto four = generate_iterations(spec, rect());
  const ShellSurface s4(four[7], 64);
  for (std::size_t k = 0; k < one.size(); ++k) CHECK(one[k].z_mm == four[k].z_mm);
  CHECK(s1.heights_m() == s4.heights_m());
  CHECK(measure(s1).area_m2 == measure(s4).area_m2);
}

TEST_CASE("zero amplitude gives the flat square") {
  GenerationSpec spec{0.0, 3, 2, 5};
  const auto grids = generate_iterations(spec, rect());
  const ShellSurface s(grids[0], 64);
  CHECK(s.heights_m().cwiseAbs().maxCoeff() == 0.0);
  const auto m = measure(s);
  CHECK(m.area_m2 == doctest::Approx(4.0));
  CHECK(m.perimeter_m == doctest::Approx(8.0));
}

TEST_CASE("single raised control point") {
  // (64 - 1) divisible by 7: every control knot is a lattice node.
  ControlGrid g = field_control_grid(0.0, 3, 7);
  g.z_mm(3, 4) = 12.0;
  const ShellSurface s(g, 64);
  for (int i = 0; i <= 7; ++i) {
    for (int j = 0; j <= 7; ++j) {
      CHECK(s.heights_m()(9 * i, 9 * j) ==
            doctest::Approx(i == 3 && j == 4 ? 0.012 : 0.0).scale(1.0).epsilon(1e-12));
    }
  }
  CHECK(s.height_at(3.0 / 7 * 2.0, 4.0 / 7 * 2.0) == doctest::Approx(0.012));
  // Influence decays away from the raised knot.
  CHECK(std::abs(s.heights_m()(27, 63)) < std::abs(s.heights_m()(27, 40)));
}

TEST_CASE("spline reproduces the analytic field within half a millimetre") {
  for (int g = 1; g <= 5; ++g) {
    const auto gp = group_params(g);
    const ControlGrid grid =
        field_control_grid(gp.amplitude_mm, gp.frequency, default_control_divisions(gp.frequency));
    const ShellSurface s(grid, 64);
    double worst = 0.0;
    for (int i = 0; i < 64; ++i) {
      for (int j = 0; j < 64; ++j) {
        const double x = 2000.0 * i / 63, y = 2000.0 * j / 63;
        const double exact = base_field(x, y, gp.amplitude_mm, gp.frequency, 2000.0);
        worst = std::max(worst, std::abs(1e3 * s.heights_m()(i, j) - exact));
      }
    }
    CAPTURE(g);
    CHECK(worst < 0.5);
  }
}

TEST_CASE("resolution below the control grid is rejected") {
  const ControlGrid grid = field_control_grid(10.0, 3, 24);
  CHECK_THROWS_AS(ShellSurface(grid, 20), ParameterError);
}

TEST_CASE("area converges with resolution") {
  GenerationSpec spec{25.0, 6, 1, 3};
  const auto grids = generate_iterations(spec, rect());
  const double a64 = measure(ShellSurface(grids[0], 64)).area_m2;
  const double a128 = measure(ShellSurface(grids[0], 128)).area_m2;
  const double a256 = measure(ShellSurface(grids[0], 256)).area_m2;
  CHECK(std::abs(a64 - a128) / a128 < 0.002);
  CHECK(std::abs(a128 - a256) < std::abs(a64 - a128));
  CHECK(a64 > 4.0);
}

TEST_CASE("depth map extremes") {
  GenerationSpec spec{25.0, 6, 1, 3};
  const ShellSurface s(generate_iterations(spec, rect())[0], 64);
  const GrayImage img = depth_map(s, 64);
  REQUIRE(img.pixels.size() == 64 * 64);
  std::uint8_t lo = 255;
  for (auto p : img.pixels) lo = std::min(lo, p);
  CHECK(lo == 0);
  // corner (0, 0) is at z = 0: bottom-left pixel white
  CHECK(img.at(63, 0) == 255);

  const ShellSurface flat(field_control_grid(0.0, 3, 24), 64);
  for (auto p : depth_map(flat, 32).pixels) CHECK(p == 255);
}

TEST_CASE("depth map clamps negative heights to white") {
  ControlGrid g = field_control_grid(0.0, 3, 3);
  g.z_mm(1, 1) = 10.0;
  g.z_mm(2, 2) = -10.0;
  const ShellSurface s(g, 64);
  const GrayImage img = depth_map(s, 64);
  const Eigen::MatrixXd z = s.sample_lattice(64);
  for (int row = 0; row < 64; ++row) {
    for (int col = 0; col < 64; ++col) {
      if (z(col, 63 - row) <= 0.0) CHECK(img.at(row, col) == 255);
    }
  }
}

TEST_CASE("pgm round trip") {
  GenerationSpec spec{15.0, 4, 1, 8};
  const GrayImage img = depth_map(ShellSurface(generate_iterations(spec, rect())[0], 64), 40);
  std::stringstream buf;
  write_pgm(buf, img);
  const GrayImage back = read_pgm(buf);
  CHECK(back.width == 40);
  CHECK(back.height == 40);
  CHECK(back.pixels == img.pixels);
}

TEST_CASE("mesh text round trip") {
  GenerationSpec spec{15.0, 4, 1, 8};
  const ShellSurface s(generate_iterations(spec, rect())[0], 40);
  std::stringstream buf;
  write_mesh(buf, s.mesh());
  const TriMesh back = read_mesh(buf);
  CHECK(back.faces == s.mesh().faces);
  REQUIRE(back.vertices.size() == s.mesh().vertices.size());
  CHECK(measure(back).area_m2 == doctest::Approx(measure(s).area_m2).epsilon(1e-9));
}

}
