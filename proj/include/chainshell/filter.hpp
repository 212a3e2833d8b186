#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chainshell/mesh.hpp"
#include "chainshell/shell3d.hpp"

namespace chainshell {

struct SurfaceMetrics {
  double perimeter_m = 0.0;  ///< length of the 3D boundary loop
  double area_m2 = 0.0;      ///< sum of triangle areas
};

/// Throws GeometryError unless the mesh is manifold with a single boundary loop.
SurfaceMetrics measure(const TriMesh& mesh);
SurfaceMetrics measure(const ShellSurface& surface);

/// |P1 - P2| > dP or |a1 - a2| > da
bool distinct(const SurfaceMetrics& a, const SurfaceMetrics& b, double delta_p, double delta_a);

/// Greedy pass in input order: keeps an entry iff it is distinct from every
/// entry kept so far; stops after `keep`. Returns kept indices (ascending).
std::vector<std::size_t> select_distinct(std::span<const SurfaceMetrics> metrics, double delta_p,
                                         double delta_a, std::size_t keep = 4);

std::vector<ShellSurface> select_distinct(const std::vector<ShellSurface>& surfaces,
                                          double delta_p, double delta_a, std::size_t keep = 4);

struct Tolerance {
  double delta_p = 0.0;
  double delta_a = 0.0;
};

struct AutoSelection {
  Tolerance tolerance;
  int halvings = 0;
  std::vector<std::size_t> kept;
  bool short_of_target = false;  ///< pool exhausted before `keep` were found
};

/// Starts at 2% of the median perimeter and area and halves both (at most
/// `max_halvings` times) until `keep` distinct entries are found.
AutoSelection auto_tolerance(std::span<const SurfaceMetrics> metrics, std::size_t keep = 4,
                             int max_halvings = 10);

}  // namespace chainshell
