#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace chainshell {

/// Triangle mesh with counter-clockwise faces (viewed from +z).
struct TriMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> faces;
};

/// Triangulates a height lattice: heights(i, j) sits at x_i = span i/(n-1),
/// y_j = span j/(n-1); each lattice cell is split along its (i,j)-(i+1,j+1)
/// diagonal.
TriMesh height_field_mesh(const Eigen::MatrixXd& heights, double span);

/// Vertex index of lattice point (i, j) in a height_field_mesh of side n.
constexpr int lattice_vertex(int i, int j, int n) { return j * n + i; }

/// Boundary edges (used by exactly one face) chained into loops.
/// Throws GeometryError if an edge is shared by more than two faces or a
/// boundary vertex does not have exactly two boundary edges.
std::vector<std::vector<int>> boundary_loops(const TriMesh& mesh);

/// ASCII mesh: "v x y z" lines then "f i j k" lines with 1-based indices.
void write_mesh(std::ostream& out, const TriMesh& mesh);
TriMesh read_mesh(std::istream& in);

}  // namespace chainshell
