#include "chainshell/shell3d.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "chainshell/error.hpp"
#include "chainshell/kernels.hpp"
#include "chainshell/rng.hpp"

namespace chainshell {

double base_field(double x_mm, double y_mm, double amplitude_mm, int frequency, double span_mm) {
  const double k = 2.0 * std::numbers::pi * frequency / span_mm;
  return amplitude_mm * std::sin(k * x_mm) * std::cos(k * y_mm);
}

ControlGrid field_control_grid(double amplitude_mm, int frequency, int divisions,
                               double span_mm) {
  if (divisions < 1) throw ParameterError("control grid needs at least one division");
  ControlGrid grid;
  grid.divisions = divisions;
  grid.amplitude_mm = amplitude_mm;
  grid.frequency = frequency;
  grid.span_mm = span_mm;
  grid.z_mm.resize(divisions + 1, divisions + 1);
  for (int i = 0; i <= divisions; ++i) {
    for (int j = 0; j <= divisions; ++j) {
      grid.z_mm(i, j) =
          base_field(grid.knot_mm(i), grid.knot_mm(j), amplitude_mm, frequency, span_mm);
    }
  }
  return grid;
}

std::vector<ControlGrid> generate_iterations(const GenerationSpec& spec,
                                             const FeasibilityEnvelope& envelope) {
  if (spec.iterations < 1) throw ParameterError("iteration count must be at least 1");
  if (!(spec.amplitude_mm >= 0.0)) throw ParameterError("amplitude must be non-negative");
  if (!(spec.offset_divisor > 0.0)) throw ParameterError("offset divisor must be positive");
  if (!envelope.covers(spec.frequency) || !envelope.feasible(spec.amplitude_mm, spec.frequency)) {
    throw EnvelopeError(fmt::format("(A = {} mm, f = {}) lies outside the {} envelope",
                                    spec.amplitude_mm, spec.frequency,
                                    shape_name(envelope.shape)));
  }
  const int divisions =
      spec.control_divisions > 0 ? spec.control_divisions : default_control_divisions(spec.frequency);
  const ControlGrid base =
      field_control_grid(spec.amplitude_mm, spec.frequency, divisions, spec.span_mm);
  const double offset_range = spec.amplitude_mm / spec.offset_divisor;
  const int n = divisions + 1;

  std::vector<ControlGrid> grids(static_cast<std::size_t>(spec.iterations), base);
#pragma omp parallel for schedule(static)
  for (int it = 0; it < spec.iterations; ++it) {
    ControlGrid& grid = grids[static_cast<std::size_t>(it)];
    grid.seed = spec.seed;
    grid.iteration = it;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const bool boundary = i == 0 || j == 0 || i == divisions || j == divisions;
        if (boundary) continue;
        const auto point = static_cast<std::uint64_t>(j * n + i);
        grid.z_mm(i, j) +=
            offset_range * keyed_uniform(spec.seed, static_cast<std::uint64_t>(it), point);
      }
    }
    grid.z_mm(0, 0) = 0.0;
    grid.z_mm(divisions, 0) = 0.0;
    grid.z_mm(0, divisions) = 0.0;
    grid.z_mm(divisions, divisions) = 0.0;
  }
  return grids;
}

ShellSurface::ShellSurface(ControlGrid control, int resolution)
    : control_(std::move(control)),
      resolution_(resolution),
      basis_(std::max(control_.divisions, 1), control_.span_mm * 1e-3) {
  if (control_.divisions < 1 || control_.z_mm.rows() != control_.divisions + 1 ||
      control_.z_mm.cols() != control_.divisions + 1) {
    throw ParameterError("control grid must hold (F+1) x (F+1) heights");
  }
  if (resolution < control_.divisions + 1) {
    throw ParameterError(fmt::format("resolution {} below control grid size {}", resolution,
                                     control_.divisions + 1));
  }
  heights_m_ = sample_lattice(resolution);
  mesh_ = height_field_mesh(heights_m_, span_m());
}

double ShellSurface::height_at(double x_m, double y_m) const {
  const Eigen::RowVectorXd wx = basis_.weights_at(x_m);
  const Eigen::RowVectorXd wy = basis_.weights_at(y_m);
  return 1e-3 * (wx * control_.z_mm * wy.transpose())(0, 0);
}

Eigen::MatrixXd ShellSurface::sample_lattice(int n) const {
  const auto pts = lattice_points(n, span_m());
  return sample(pts, pts);
}

Eigen::MatrixXd ShellSurface::sample(const std::vector<double>& xs_m,
                                     const std::vector<double>& ys_m) const {
  return 1e-3 * kernels::omp::tensor_sample(basis_.weights(xs_m), control_.z_mm,
                                            basis_.weights(ys_m));
}

ShellSurface interpolate_surface(const ControlGrid& grid, int resolution) {
  return ShellSurface(grid, resolution);
}

GrayImage depth_map(const ShellSurface& surface, int resolution) {
  if (resolution < 2) throw ParameterError("depth map needs at least 2 pixels per side");
  const Eigen::MatrixXd z = surface.sample_lattice(resolution);
  const double z_max = z.maxCoeff();
  GrayImage image;
  image.width = resolution;
  image.height = resolution;
  image.pixels.assign(static_cast<std::size_t>(resolution * resolution), 255);
  if (!(z_max > 0.0)) return image;
  for (int row = 0; row < resolution; ++row) {
    const int j = resolution - 1 - row;
    for (int col = 0; col < resolution; ++col) {
      const double v = std::round(255.0 * (1.0 - z(col, j) / z_max));
      image.pixels[static_cast<std::size_t>(row * resolution + col)] =
          static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return image;
}

void write_pgm(std::ostream& out, const GrayImage& image) {
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

GrayImage read_pgm(std::istream& in) {
  std::string magic;
  GrayImage image;
  int maxval = 0;
  in >> magic >> image.width >> image.height >> maxval;
  if (magic != "P5" || maxval != 255 || image.width <= 0 || image.height <= 0) {
    throw GeometryError("not a binary 8-bit graymap");
  }
  in.get();
  image.pixels.resize(static_cast<std::size_t>(image.width * image.height));
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (!in) throw GeometryError("truncated graymap");
  return image;
}

GroupParams group_params(int group) {
  if (group < 1) throw ParameterError("group numbers start at 1");
  return {group, 5.0 * (group + 1), group + 2};
}

}  // namespace chainshell
