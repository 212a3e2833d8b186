#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "chainshell/mesh.hpp"
#include "chainshell/profile2d.hpp"
#include "chainshell/spline.hpp"

namespace chainshell {

/// A sin(2 pi f x / L) cos(2 pi f y / L); all lengths in millimetres.
double base_field(double x_mm, double y_mm, double amplitude_mm, int frequency, double span_mm);

/// Control heights over an F x F division of the square plan.
struct ControlGrid {
  int divisions = 0;  ///< F; the grid holds (F+1)^2 points
  double amplitude_mm = 0.0;
  int frequency = 0;
  double span_mm = 2000.0;
  std::uint64_t seed = 0;
  int iteration = 0;
  Eigen::MatrixXd z_mm;  ///< z_mm(i, j) at x_i = L i / F, y_j = L j / F

  double knot_mm(int i) const { return span_mm * i / divisions; }
};

/// Control divisions used when a grid is built for frequency f. The lattice
/// must be finer than the wave: with F = f every control point falls on a
/// node of the sine and the field vanishes.
constexpr int default_control_divisions(int frequency) { return 8 * frequency; }

struct GenerationSpec {
  double amplitude_mm = 25.0;
  int frequency = 6;
  int iterations = 20;
  std::uint64_t seed = 42;
  double span_mm = 2000.0;
  int control_divisions = 0;  ///< 0 selects default_control_divisions(frequency)
  double offset_divisor = 5.0;  ///< random offsets lie in [0, A / offset_divisor]
};

/// Base field sampled at the control points, nothing added.
ControlGrid field_control_grid(double amplitude_mm, int frequency, int divisions,
                               double span_mm = 2000.0);

/// Seeded iterations: interior control points receive an offset drawn from
/// [0, A/5] keyed by (seed, iteration, point); boundary points keep the base
/// field and the four corners sit at z = 0. Throws EnvelopeError when (A, f)
/// is outside the envelope.
std::vector<ControlGrid> generate_iterations(const GenerationSpec& spec,
                                             const FeasibilityEnvelope& envelope);

/// Immutable sampled surface. Heights and mesh coordinates are in metres.
class ShellSurface {
 public:
  ShellSurface(ControlGrid control, int resolution);

  const ControlGrid& control() const { return control_; }
  int resolution() const { return resolution_; }
  double span_m() const { return control_.span_mm * 1e-3; }
  const Eigen::MatrixXd& heights_m() const { return heights_m_; }
  const TriMesh& mesh() const { return mesh_; }

  /// Spline height at a plan point (metres in, metres out).
  double height_at(double x_m, double y_m) const;
  /// Heights on an n x n lattice covering the plan, endpoints included.
  Eigen::MatrixXd sample_lattice(int n) const;
  /// Heights at arbitrary x and y coordinate lists (tensor grid).
  Eigen::MatrixXd sample(const std::vector<double>& xs_m, const std::vector<double>& ys_m) const;

  double max_height_m() const { return heights_m_.maxCoeff(); }
  double min_height_m() const { return heights_m_.minCoeff(); }

 private:
  ControlGrid control_;
  int resolution_;
  CubicSplineBasis basis_;
  Eigen::MatrixXd heights_m_;
  TriMesh mesh_;
};

/// Interpolates the control heights with a tensor-product cubic spline and
/// triangulates a resolution x resolution lattice. Throws ParameterError when
/// resolution < F + 1.
ShellSurface interpolate_surface(const ControlGrid& grid, int resolution = 64);

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  ///< row-major, row 0 at the top (largest y)

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row * width + col)];
  }
};

/// Plan-view depth image: value = round(255 (1 - z / z_max)), clamped to
/// [0, 255]. The highest point is black; z <= 0 and flat surfaces are white.
GrayImage depth_map(const ShellSurface& surface, int resolution);

/// Binary portable graymap (P5, maxval 255).
void write_pgm(std::ostream& out, const GrayImage& image);
GrayImage read_pgm(std::istream& in);

/// Group g: A = 5 (g + 1) mm, f = g + 2.
struct GroupParams {
  int group = 1;
  double amplitude_mm = 10.0;
  int frequency = 3;
};
GroupParams group_params(int group);

}  // namespace chainshell
