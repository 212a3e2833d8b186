#include "chainshell/filter.hpp"

#include <algorithm>
#include <cmath>

#include "chainshell/error.hpp"
#include "chainshell/kernels.hpp"

namespace chainshell {

SurfaceMetrics measure(const TriMesh& mesh) {
  const auto loops = boundary_loops(mesh);
  if (loops.size() != 1) {
    throw GeometryError("mesh boundary must be a single closed loop");
  }
  const auto& loop = loops.front();
  double perimeter = 0.0;
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const auto& a = mesh.vertices[static_cast<std::size_t>(loop[k])];
    const auto& b = mesh.vertices[static_cast<std::size_t>(loop[(k + 1) % loop.size()])];
    perimeter += (b - a).norm();
  }
  return {perimeter, kernels::omp::mesh_area(mesh)};
}

SurfaceMetrics measure(const ShellSurface& surface) { return measure(surface.mesh()); }

bool distinct(const SurfaceMetrics& a, const SurfaceMetrics& b, double delta_p, double delta_a) {
  return std::abs(a.perimeter_m - b.perimeter_m) > delta_p ||
         std::abs(a.area_m2 - b.area_m2) > delta_a;
}

std::vector<std::size_t> select_distinct(std::span<const SurfaceMetrics> metrics, double delta_p,
                                         double delta_a, std::size_t keep) {
  if (delta_p < 0.0 || delta_a < 0.0) throw ParameterError("tolerances must be non-negative");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < metrics.size() && kept.size() < keep; ++i) {
    const bool unique = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return distinct(metrics[i], metrics[k], delta_p, delta_a);
    });
    if (unique) kept.push_back(i);
  }
  return kept;
}

std::vector<ShellSurface> select_distinct(const std::vector<ShellSurface>& surfaces,
                                          double delta_p, double delta_a, std::size_t keep) {
  if (surfaces.empty()) throw ParameterError("no surfaces to select from");
  std::vector<SurfaceMetrics> metrics(surfaces.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < surfaces.size(); ++i) metrics[i] = measure(surfaces[i]);
  std::vector<ShellSurface> out;
  for (const auto i : select_distinct(metrics, delta_p, delta_a, keep)) {
    out.push_back(surfaces[i]);
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

AutoSelection auto_tolerance(std::span<const SurfaceMetrics> metrics, std::size_t keep,
                             int max_halvings) {
  if (max_halvings < 0) throw ParameterError("max_halvings must be non-negative");
  if (metrics.size() < 2) throw ParameterError("auto tolerance needs at least two surfaces");
  std::vector<double> perimeters;
  std::vector<double> areas;
  for (const auto& m : metrics) {
    perimeters.push_back(m.perimeter_m);
    areas.push_back(m.area_m2);
  }
  AutoSelection sel;
  sel.tolerance = {0.02 * median(perimeters), 0.02 * median(areas)};
  for (;;) {
    sel.kept = select_distinct(metrics, sel.tolerance.delta_p, sel.tolerance.delta_a, keep);
    if (sel.kept.size() >= keep || sel.halvings == max_halvings) break;
    sel.tolerance.delta_p *= 0.5;
    sel.tolerance.delta_a *= 0.5;
    ++sel.halvings;
  }
  sel.short_of_target = sel.kept.size() < keep;
  return sel;
}

}  // namespace chainshell
