#include <doctest.h>

#include "chainshell/kernels.hpp"
#include "chainshell/rng.hpp"
#include "chainshell/shell3d.hpp"

using namespace chainshell;

namespace {

struct ThreadGuard {
  int saved = thread_count();
  ~ThreadGuard() { set_thread_count(saved); }
};

Eigen::MatrixXd keyed_matrix(int rows, int cols, std::uint64_t stream) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = keyed_uniform(123, stream, static_cast<std::uint64_t>(i * cols + j)) - 0.5;
    }
  }
  return m;
}

ShellSurface sample_surface() {
  GenerationSpec spec{25.0, 6, 1, 42};
  return ShellSurface(generate_iterations(spec, default_envelopes().at(UnitShape::Rectangular))[0],
                      200);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("mesh area agrees with the serial reference") {
  const auto s = sample_surface();
  CHECK(kernels::omp::mesh_area(s.mesh()) ==
        doctest::Approx(kernels::serial::mesh_area(s.mesh())).epsilon(1e-12));
}

TEST_CASE("tensor sampling agrees with the serial reference") {
  const auto wx = keyed_matrix(150, 41, 1), c = keyed_matrix(41, 41, 2), wy = keyed_matrix(170, 41, 3);
  const Eigen::MatrixXd a = kernels::omp::tensor_sample(wx, c, wy);
  const Eigen::MatrixXd b = kernels::serial::tensor_sample(wx, c, wy);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("obstruction count agrees with the serial reference") {
  const auto h = keyed_matrix(300, 300, 4);
  const std::vector<Footprint> feet{{0.5, 0.5, 0.1}, {1.2, 0.3, 0.05}, {1.9, 1.9, 0.2}};
  CHECK(kernels::omp::obstructed_cells(h, 0.1, 2.0 / 300, feet) ==
        kernels::serial::obstructed_cells(h, 0.1, 2.0 / 300, feet));
}

TEST_CASE("kernels are thread-count invariant") {
  ThreadGuard guard;
  const auto s = sample_surface();
  const auto wx = keyed_matrix(120, 33, 5), c = keyed_matrix(33, 33, 6);
  set_thread_count(1);
  const double area1 = kernels::omp::mesh_area(s.mesh());
  const Eigen::MatrixXd t1 = kernels::omp::tensor_sample(wx, c, wx);
  for (int threads : {2, 3, 8}) {
    set_thread_count(threads);
    CHECK(kernels::omp::mesh_area(s.mesh()) == area1);
    CHECK(kernels::omp::tensor_sample(wx, c, wx) == t1);
  }
}

TEST_CASE("triangle area") {
  CHECK(kernels::triangle_area({0, 0, 0}, {1, 0, 0}, {0, 1, 0}) == doctest::Approx(0.5));
  CHECK(kernels::triangle_area({0, 0, 0}, {2, 0, 0}, {4, 0, 0}) == 0.0);
}

}
