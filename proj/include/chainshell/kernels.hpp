#pragma once

#include <vector>

#include <Eigen/Dense>

#include "chainshell/mesh.hpp"

namespace chainshell {

/// Square footprint in plan, metres.
struct Footprint {
  double x = 0.0;
  double y = 0.0;
  double side = 0.0;

  bool contains(double px, double py) const {
    const double half = 0.5 * side;
    return px >= x - half && px <= x + half && py >= y - half && py <= y + half;
  }
};

namespace kernels {

/// Data-parallel kernels. Reductions accumulate per-row partial sums and add
/// them in a fixed order, so results do not depend on the thread count.
namespace omp {

double mesh_area(const TriMesh& mesh);

/// wx * control * wy^T
Eigen::MatrixXd tensor_sample(const Eigen::MatrixXd& wx, const Eigen::MatrixXd& control,
                              const Eigen::MatrixXd& wy);

/// Number of raster cells with height below `clear_height` or whose centre
/// lies in a footprint. heights(i, j) is the height at cell centre (i, j).
long obstructed_cells(const Eigen::MatrixXd& heights, double clear_height, double cell_size,
                      const std::vector<Footprint>& footprints);

}  // namespace omp

/// Straight-line references for the kernels above.
namespace serial {

double mesh_area(const TriMesh& mesh);
Eigen::MatrixXd tensor_sample(const Eigen::MatrixXd& wx, const Eigen::MatrixXd& control,
                              const Eigen::MatrixXd& wy);
long obstructed_cells(const Eigen::MatrixXd& heights, double clear_height, double cell_size,
                      const std::vector<Footprint>& footprints);

}  // namespace serial

double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c);

}  // namespace kernels

/// Sets the OpenMP thread count used by every kernel; values < 1 are ignored.
void set_thread_count(int threads);
int thread_count();

}  // namespace chainshell
