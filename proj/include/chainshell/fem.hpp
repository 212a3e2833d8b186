#pragma once

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "chainshell/loads.hpp"
#include "chainshell/shell3d.hpp"

namespace chainshell {

using Vector6d = Eigen::Matrix<double, 6, 1>;

enum class SupportKind {
  Fixed,       ///< all translations and rotations
  Pinned,      ///< translations only
  SlidingBase  ///< vertical translation only
};

enum class ElementKind {
  Beam,  ///< 12-dof Euler-Bernoulli frame element
  Truss  ///< axial only; end nodes carry no rotational dofs from it
};

/// Cross-section constants, SI units (m^2, m^4).
struct Section {
  double area = 0.0;
  double inertia_y = 0.0;  ///< about local y: bending that moves the element along local z
  double inertia_z = 0.0;  ///< about local z: bending that moves it along local y
  double torsion = 0.0;

  /// Solid rectangle, `depth` along local z.
  static Section rectangle(double width, double depth);
};

struct Material {
  double elastic_modulus = 2.1e9;  ///< Pa
  double shear_modulus = 0.78e9;   ///< Pa
};

struct FrameElement {
  int a = 0;
  int b = 0;
  Section section;
  ElementKind kind = ElementKind::Beam;
  /// Reference direction for local z; zero selects global Z (or global X for
  /// vertical members).
  Eigen::Vector3d orientation = Eigen::Vector3d::Zero();
  std::optional<Material> material;  ///< overrides the model material
};

struct FrameModel {
  std::vector<Eigen::Vector3d> nodes;  ///< metres
  std::vector<FrameElement> elements;
  std::map<int, SupportKind> supports;
  Material material;

  /// Throws GeometryError for dangling or zero-length elements.
  void validate() const;
};

struct SolveResult {
  std::vector<Vector6d> displacements;  ///< ux uy uz (m), rx ry rz (rad) per node
  double max_translation_mm = 0.0;
  int max_translation_node = -1;
  std::map<int, Eigen::Vector3d> reactions_kN;
  /// max over axes of |sum of reactions + sum of applied| / |sum of applied|
  double equilibrium_residual = 0.0;
};

/// Solves K u = F for point forces (newtons, one per node). Throws
/// MechanismError naming every unrestrained degree of freedom when the
/// reduced stiffness is not positive definite.
SolveResult solve(const FrameModel& model, const std::vector<Eigen::Vector3d>& nodal_forces_N);

/// Homogenised chainmail shell: each lattice member gets a rectangle of width
/// solid_fraction x tributary width and depth = thickness.
struct ShellSection {
  double thickness_m = 0.08;
  double solid_fraction = 0.08;
};

/// Samples the surface on a (grid+1)^2 lattice and links rows, columns and one
/// diagonal per cell. Node (i, j) has index j (grid+1) + i. No supports.
FrameModel frame_from_surface(const ShellSurface& surface, int grid, const ShellSection& section,
                              const Material& material);

/// Nearest lattice node to a plan point.
int nearest_lattice_node(double x_m, double y_m, int grid, double span_m);

/// Plan area carried by each lattice node (quarter cells around it).
std::vector<double> tributary_areas(int grid, double span_m);

struct PointSupport {
  double x_m = 0.0;
  double y_m = 0.0;
  SupportKind kind = SupportKind::Pinned;
};

enum class ColumnRole { LoadBearing, Formwork };

/// Vertical column from the ground to the shell. Load-bearing columns are
/// fixed at the base and rigidly joined to the shell; formwork columns are
/// pinned at both ends and carry axial force only.
struct ColumnSupport {
  double x_m = 0.0;
  double y_m = 0.0;
  double side_m = 0.05;
  ColumnRole role = ColumnRole::Formwork;
};

struct SupportLayout {
  std::vector<PointSupport> points;
  std::vector<ColumnSupport> columns;

  /// Four plan corners, pinned.
  static SupportLayout corners(double span_m, SupportKind kind = SupportKind::Pinned);
  /// Every boundary lattice node.
  static SupportLayout perimeter(double span_m, int grid, SupportKind kind = SupportKind::Pinned);
};

struct AnalysisOptions {
  int grid = 10;
  ShellSection section;
  Material material;
  Material column_material{11.0e9, 0.69e9};  ///< softwood-like
  double span_m = 2.0;  ///< deflection-limit span
};

struct ShellAnalysis {
  FrameModel model;
  SolveResult result;
  std::vector<int> column_ground_nodes;  ///< per column, -1 if replaced by a point support
  double max_displacement_mm = 0.0;
  double limit_mm = 0.0;
  bool pass = false;
};

/// Builds the shell frame with the given supports, spreads the total load over
/// the lattice by tributary plan area, adds the membrane pre-compression as
/// inward normal forces (same weighting) and solves.
ShellAnalysis analyze_shell(const ShellSurface& surface, const SupportLayout& supports,
                            const LoadCase& load, double precompression_N = 1.0,
                            const AnalysisOptions& options = {});

}  // namespace chainshell
