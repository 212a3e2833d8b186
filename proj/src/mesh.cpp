#include "chainshell/mesh.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "chainshell/error.hpp"

namespace chainshell {

TriMesh height_field_mesh(const Eigen::MatrixXd& heights, double span) {
  const int n = static_cast<int>(heights.rows());
  if (n < 2 || heights.cols() != n) {
    throw GeometryError("height lattice must be square with at least 2 samples per side");
  }
  TriMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = i == n - 1 ? span : span * i / (n - 1);
      const double y = j == n - 1 ? span : span * j / (n - 1);
      mesh.vertices.emplace_back(x, y, heights(i, j));
    }
  }
  mesh.faces.reserve(static_cast<std::size_t>(2 * (n - 1) * (n - 1)));
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      const int a = lattice_vertex(i, j, n);
      const int b = lattice_vertex(i + 1, j, n);
      const int c = lattice_vertex(i + 1, j + 1, n);
      const int d = lattice_vertex(i, j + 1, n);
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }
  return mesh;
}

std::vector<std::vector<int>> boundary_loops(const TriMesh& mesh) {
  if (mesh.faces.empty()) throw GeometryError("mesh has no faces");
  const auto nv = static_cast<std::uint64_t>(mesh.vertices.size());
  std::unordered_map<std::uint64_t, int> uses;
  uses.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k];
      const int b = f[(k + 1) % 3];
      if (a < 0 || b < 0 || static_cast<std::uint64_t>(a) >= nv ||
          static_cast<std::uint64_t>(b) >= nv) {
        throw GeometryError("face references a missing vertex");
      }
      if (a == b) throw GeometryError("degenerate face with repeated vertex");
      const auto lo = static_cast<std::uint64_t>(std::min(a, b));
      const auto hi = static_cast<std::uint64_t>(std::max(a, b));
      if (++uses[lo * nv + hi] > 2) {
        throw GeometryError(fmt::format("non-manifold edge ({}, {})", lo, hi));
      }
    }
  }

  std::unordered_map<int, std::vector<int>> adjacency;
  for (const auto& [key, count] : uses) {
    if (count != 1) continue;
    const int a = static_cast<int>(key / nv);
    const int b = static_cast<int>(key % nv);
    adjacency[a].push_back(b);
    adjacency[b].push_back(a);
  }
  for (const auto& [v, nbrs] : adjacency) {
    if (nbrs.size() != 2) {
      throw GeometryError(fmt::format("boundary vertex {} has {} boundary edges", v, nbrs.size()));
    }
  }

  // walk from the smallest unvisited vertex so loops come out in a fixed order
  std::vector<int> starts;
  starts.reserve(adjacency.size());
  for (const auto& [v, nbrs] : adjacency) starts.push_back(v);
  std::sort(starts.begin(), starts.end());
  std::unordered_map<int, bool> visited;
  std::vector<std::vector<int>> loops;
  for (const int start : starts) {
    if (visited[start]) continue;
    std::vector<int> loop;
    int prev = -1;
    int cur = start;
    do {
      visited[cur] = true;
      loop.push_back(cur);
      const auto& nbrs = adjacency[cur];
      const int next = nbrs[0] != prev ? nbrs[0] : nbrs[1];
      prev = cur;
      cur = next;
    } while (cur != start);
    loops.push_back(std::move(loop));
  }
  return loops;
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  for (const auto& v : mesh.vertices) {
    fmt::print(out, "v {:.9f} {:.9f} {:.9f}\n", v.x(), v.y(), v.z());
  }
  for (const auto& f : mesh.faces) {
    fmt::print(out, "f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1);
  }
}

TriMesh read_mesh(std::istream& in) {
  TriMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag)) continue;
    if (tag == "v") {
      double x = 0, y = 0, z = 0;
      if (!(fields >> x >> y >> z)) throw GeometryError("malformed vertex line: " + line);
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      int a = 0, b = 0, c = 0;
      if (!(fields >> a >> b >> c)) throw GeometryError("malformed face line: " + line);
      mesh.faces.push_back({a - 1, b - 1, c - 1});
    }
  }
  return mesh;
}

}  // namespace chainshell
