#include "chainshell/kernels.hpp"

#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chainshell {

namespace kernels {

double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                     const Eigen::Vector3d& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

namespace {

bool obstructed(double h, double px, double py, double clear_height,
                const std::vector<Footprint>& footprints) {
  if (h < clear_height) return true;
  for (const auto& fp : footprints) {
    if (fp.contains(px, py)) return true;
  }
  return false;
}

constexpr long kAreaBlock = 256;

}  // namespace

namespace omp {

double mesh_area(const TriMesh& mesh) {
  const long faces = static_cast<long>(mesh.faces.size());
  const long blocks = (faces + kAreaBlock - 1) / kAreaBlock;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    double sum = 0.0;
    const long end = std::min(faces, (b + 1) * kAreaBlock);
    for (long f = b * kAreaBlock; f < end; ++f) {
      const auto& tri = mesh.faces[static_cast<std::size_t>(f)];
      sum += triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    }
    partial[static_cast<std::size_t>(b)] = sum;
  }
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

Eigen::MatrixXd tensor_sample(const Eigen::MatrixXd& wx, const Eigen::MatrixXd& control,
                              const Eigen::MatrixXd& wy) {
  const Eigen::MatrixXd left = wx * control;
  Eigen::MatrixXd out(wx.rows(), wy.rows());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i).noalias() = left.row(i) * wy.transpose();
  }
  return out;
}

long obstructed_cells(const Eigen::MatrixXd& heights, double clear_height, double cell_size,
                      const std::vector<Footprint>& footprints) {
  long count = 0;
  const Eigen::Index rows = heights.rows();
  const Eigen::Index cols = heights.cols();
#pragma omp parallel for schedule(static) reduction(+ : count)
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double px = (static_cast<double>(i) + 0.5) * cell_size;
      const double py = (static_cast<double>(j) + 0.5) * cell_size;
      if (obstructed(heights(i, j), px, py, clear_height, footprints)) ++count;
    }
  }
  return count;
}

}  // namespace omp

namespace serial {

double mesh_area(const TriMesh& mesh) {
  double sum = 0.0;
  for (const auto& tri : mesh.faces) {
    sum += triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
  }
  return sum;
}

Eigen::MatrixXd tensor_sample(const Eigen::MatrixXd& wx, const Eigen::MatrixXd& control,
                              const Eigen::MatrixXd& wy) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(wx.rows(), wy.rows());
  for (Eigen::Index i = 0; i < wx.rows(); ++i) {
    for (Eigen::Index j = 0; j < wy.rows(); ++j) {
      double s = 0.0;
      for (Eigen::Index a = 0; a < control.rows(); ++a) {
        for (Eigen::Index b = 0; b < control.cols(); ++b) {
          s += wx(i, a) * control(a, b) * wy(j, b);
        }
      }
      out(i, j) = s;
    }
  }
  return out;
}

long obstructed_cells(const Eigen::MatrixXd& heights, double clear_height, double cell_size,
                      const std::vector<Footprint>& footprints) {
  long count = 0;
  for (Eigen::Index i = 0; i < heights.rows(); ++i) {
    for (Eigen::Index j = 0; j < heights.cols(); ++j) {
      const double px = (static_cast<double>(i) + 0.5) * cell_size;
      const double py = (static_cast<double>(j) + 0.5) * cell_size;
      if (obstructed(heights(i, j), px, py, clear_height, footprints)) ++count;
    }
  }
  return count;
}

}  // namespace serial

}  // namespace kernels

void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads >= 1) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace chainshell
