#include "chainshell/fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "chainshell/error.hpp"

namespace chainshell {

namespace {

using Matrix12d = Eigen::Matrix<double, 12, 12>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

constexpr std::array<const char*, 6> kDofNames = {"ux", "uy", "uz", "rx", "ry", "rz"};

Matrix12d local_beam_stiffness(const Section& s, const Material& m, double l) {
  const double e = m.elastic_modulus;
  const double g = m.shear_modulus;
  const double l2 = l * l;
  const double l3 = l2 * l;
  Matrix12d k = Matrix12d::Zero();

  const double ea = e * s.area / l;
  k(0, 0) = k(6, 6) = ea;
  k(0, 6) = -ea;

  const double gj = g * s.torsion / l;
  k(3, 3) = k(9, 9) = gj;
  k(3, 9) = -gj;

  // v / rz, bending about local z
  const double iz = e * s.inertia_z;
  k(1, 1) = k(7, 7) = 12.0 * iz / l3;
  k(1, 7) = -12.0 * iz / l3;
  k(1, 5) = k(1, 11) = 6.0 * iz / l2;
  k(5, 7) = k(7, 11) = -6.0 * iz / l2;
  k(5, 5) = k(11, 11) = 4.0 * iz / l;
  k(5, 11) = 2.0 * iz / l;

  // w / ry, bending about local y
  const double iy = e * s.inertia_y;
  k(2, 2) = k(8, 8) = 12.0 * iy / l3;
  k(2, 8) = -12.0 * iy / l3;
  k(2, 4) = k(2, 10) = -6.0 * iy / l2;
  k(4, 8) = k(8, 10) = 6.0 * iy / l2;
  k(4, 4) = k(10, 10) = 4.0 * iy / l;
  k(4, 10) = 2.0 * iy / l;

  return k.selfadjointView<Eigen::Upper>();
}

/// Rows are the local x, y, z axes in global coordinates.
Eigen::Matrix3d local_axes(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                           const Eigen::Vector3d& orientation) {
  const Eigen::Vector3d ex = (b - a).normalized();
  Eigen::Vector3d ref = orientation;
  if (ref.norm() < 1e-12 || std::abs(ref.normalized().dot(ex)) > 0.999) {
    ref = std::abs(ex.z()) > 0.999 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitZ();
  }
  const Eigen::Vector3d ez = (ref - ref.dot(ex) * ex).normalized();
  const Eigen::Vector3d ey = ez.cross(ex);
  Eigen::Matrix3d r;
  r.row(0) = ex;
  r.row(1) = ey;
  r.row(2) = ez;
  return r;
}

Matrix12d global_beam_stiffness(const FrameElement& el, const Material& m,
                                const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Matrix3d r = local_axes(a, b, el.orientation);
  Matrix12d t = Matrix12d::Zero();
  for (int blk = 0; blk < 4; ++blk) t.block<3, 3>(3 * blk, 3 * blk) = r;
  return t.transpose() * local_beam_stiffness(el.section, m, (b - a).norm()) * t;
}

Matrix6d global_truss_stiffness(const FrameElement& el, const Material& m,
                                const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const double l = (b - a).norm();
  const Eigen::Vector3d e = (b - a) / l;
  const Eigen::Matrix3d kk = (m.elastic_modulus * el.section.area / l) * (e * e.transpose());
  Matrix6d k;
  k << kk, -kk, -kk, kk;
  return k;
}

bool constrained(SupportKind kind, int comp) {
  switch (kind) {
    case SupportKind::Fixed: return true;
    case SupportKind::Pinned: return comp < 3;
    case SupportKind::SlidingBase: return comp == 2;
  }
  return false;
}

/// Unblocked Cholesky that treats non-positive (relative to the diagonal)
/// pivots as mechanisms, records them and carries on.
std::vector<int> mechanism_pivots(Eigen::MatrixXd k) {
  const Eigen::Index n = k.rows();
  std::vector<int> bad;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double diag0 = k(j, j);
    double d = diag0;
    for (Eigen::Index p = 0; p < j; ++p) d -= k(j, p) * k(j, p);
    if (!(d > 1e-10 * std::max(std::abs(diag0), 1e-300))) {
      bad.push_back(static_cast<int>(j));
      for (Eigen::Index p = 0; p < j; ++p) k(j, p) = 0.0;
      k(j, j) = 1.0;
      for (Eigen::Index i = j + 1; i < n; ++i) k(i, j) = 0.0;
      continue;
    }
    const double ljj = std::sqrt(d);
    k(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = k(i, j);
      for (Eigen::Index p = 0; p < j; ++p) s -= k(i, p) * k(j, p);
      k(i, j) = s / ljj;
    }
  }
  return bad;
}

}  // namespace

Section Section::rectangle(double width, double depth) {
  Section s;
  s.area = width * depth;
  s.inertia_y = width * depth * depth * depth / 12.0;
  s.inertia_z = depth * width * width * width / 12.0;
  const double a = std::max(width, depth);
  const double b = std::min(width, depth);
  const double ratio = b / a;
  s.torsion = a * b * b * b * (1.0 / 3.0 - 0.21 * ratio * (1.0 - std::pow(ratio, 4) / 12.0));
  return s;
}

void FrameModel::validate() const {
  const int n = static_cast<int>(nodes.size());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const auto& el = elements[e];
    if (el.a < 0 || el.b < 0 || el.a >= n || el.b >= n || el.a == el.b) {
      throw GeometryError(fmt::format("element {} must join two distinct existing nodes", e));
    }
    if ((nodes[static_cast<std::size_t>(el.a)] - nodes[static_cast<std::size_t>(el.b)]).norm() <
        1e-12) {
      throw GeometryError(fmt::format("element {} has zero length", e));
    }
    if (!(el.section.area > 0.0)) {
      throw GeometryError(fmt::format("element {} has non-positive area", e));
    }
  }
  for (const auto& [node, kind] : supports) {
    if (node < 0 || node >= n) throw GeometryError(fmt::format("support on missing node {}", node));
  }
}

SolveResult solve(const FrameModel& model, const std::vector<Eigen::Vector3d>& nodal_forces_N) {
  model.validate();
  const int n = static_cast<int>(model.nodes.size());
  if (static_cast<int>(nodal_forces_N.size()) != n) {
    throw ParameterError("one force vector per node is required");
  }

  std::vector<bool> has_rotation(static_cast<std::size_t>(n), false);
  for (const auto& el : model.elements) {
    if (el.kind == ElementKind::Beam) {
      has_rotation[static_cast<std::size_t>(el.a)] = true;
      has_rotation[static_cast<std::size_t>(el.b)] = true;
    }
  }

  // active dof numbering: free dofs first, constrained after
  constexpr int kInactive = -1;
  std::vector<std::array<int, 6>> index(static_cast<std::size_t>(n));
  int n_free = 0;
  int n_fixed = 0;
  std::vector<std::pair<int, int>> fixed_list;
  for (int node = 0; node < n; ++node) {
    const auto sup = model.supports.find(node);
    for (int c = 0; c < 6; ++c) {
      auto& slot = index[static_cast<std::size_t>(node)][static_cast<std::size_t>(c)];
      if (c >= 3 && !has_rotation[static_cast<std::size_t>(node)]) {
        slot = kInactive;
      } else if (sup != model.supports.end() && constrained(sup->second, c)) {
        slot = -2 - n_fixed++;
        fixed_list.emplace_back(node, c);
      } else {
        slot = n_free++;
      }
    }
  }
  const int n_total = n_free + n_fixed;
  const auto position = [&](int node, int c) {
    const int slot = index[static_cast<std::size_t>(node)][static_cast<std::size_t>(c)];
    if (slot == kInactive) return -1;
    return slot >= 0 ? slot : n_free + (-2 - slot);
  };

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n_total, n_total);
  for (const auto& el : model.elements) {
    const Material& mat = el.material ? *el.material : model.material;
    const auto& pa = model.nodes[static_cast<std::size_t>(el.a)];
    const auto& pb = model.nodes[static_cast<std::size_t>(el.b)];
    if (el.kind == ElementKind::Beam) {
      const Matrix12d ke = global_beam_stiffness(el, mat, pa, pb);
      std::array<int, 12> map{};
      for (int c = 0; c < 6; ++c) {
        map[static_cast<std::size_t>(c)] = position(el.a, c);
        map[static_cast<std::size_t>(6 + c)] = position(el.b, c);
      }
      for (int r = 0; r < 12; ++r) {
        for (int c = 0; c < 12; ++c) k(map[r], map[c]) += ke(r, c);
      }
    } else {
      const Matrix6d ke = global_truss_stiffness(el, mat, pa, pb);
      std::array<int, 6> map{};
      for (int c = 0; c < 3; ++c) {
        map[static_cast<std::size_t>(c)] = position(el.a, c);
        map[static_cast<std::size_t>(3 + c)] = position(el.b, c);
      }
      for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) k(map[r], map[c]) += ke(r, c);
      }
    }
  }

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n_total);
  for (int node = 0; node < n; ++node) {
    for (int c = 0; c < 3; ++c) f(position(node, c)) += nodal_forces_N[static_cast<std::size_t>(node)](c);
  }

  const auto name_dof = [&](int free_index) {
    for (int node = 0; node < n; ++node) {
      for (int c = 0; c < 6; ++c) {
        if (index[static_cast<std::size_t>(node)][static_cast<std::size_t>(c)] == free_index) {
          return fmt::format("node {} {}", node, kDofNames[static_cast<std::size_t>(c)]);
        }
      }
    }
    return std::string("?");
  };
  const auto mechanism = [&](const std::vector<int>& dofs) {
    std::string names;
    for (std::size_t i = 0; i < dofs.size() && i < 24; ++i) {
      if (i) names += ", ";
      names += name_dof(dofs[i]);
    }
    if (dofs.size() > 24) names += fmt::format(", ... ({} total)", dofs.size());
    return MechanismError("stiffness matrix is singular; unrestrained: " + names);
  };

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n_total);
  if (n_free > 0) {
    const Eigen::MatrixXd kff = k.topLeftCorner(n_free, n_free);
    Eigen::LLT<Eigen::MatrixXd> llt(kff);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
      const Eigen::MatrixXd& l = llt.matrixLLT();
      for (Eigen::Index j = 0; j < n_free && ok; ++j) {
        ok = l(j, j) * l(j, j) > 1e-10 * kff(j, j);
      }
    }
    if (!ok) {
      auto bad = mechanism_pivots(kff);
      if (bad.empty()) bad.push_back(0);
      throw mechanism(bad);
    }
    u.head(n_free) = llt.solve(f.head(n_free));
  }

  SolveResult result;
  result.displacements.assign(static_cast<std::size_t>(n), Vector6d::Zero());
  for (int node = 0; node < n; ++node) {
    auto& d = result.displacements[static_cast<std::size_t>(node)];
    for (int c = 0; c < 6; ++c) {
      const int p = position(node, c);
      if (p >= 0) d(c) = u(p);
    }
    const double t = d.head<3>().norm() * 1e3;
    if (t > result.max_translation_mm) {
      result.max_translation_mm = t;
      result.max_translation_node = node;
    }
  }

  const Eigen::VectorXd internal = k.bottomRows(n_fixed) * u;
  Eigen::Vector3d reaction_sum = Eigen::Vector3d::Zero();
  for (int r = 0; r < n_fixed; ++r) {
    const auto [node, c] = fixed_list[static_cast<std::size_t>(r)];
    if (c >= 3) continue;
    const double reaction = internal(r) - f(n_free + r);
    auto [it, inserted] = result.reactions_kN.try_emplace(node, Eigen::Vector3d::Zero());
    it->second(c) = reaction * 1e-3;
    reaction_sum(c) += reaction;
  }
  for (const auto& [node, kind] : model.supports) {
    result.reactions_kN.try_emplace(node, Eigen::Vector3d::Zero());
  }
  Eigen::Vector3d applied = Eigen::Vector3d::Zero();
  for (const auto& fn : nodal_forces_N) applied += fn;
  const double scale = std::max(applied.norm(), 1e-300);
  result.equilibrium_residual = (reaction_sum + applied).cwiseAbs().maxCoeff() / scale;
  if (applied.norm() == 0.0) result.equilibrium_residual = reaction_sum.norm();
  return result;
}

int nearest_lattice_node(double x_m, double y_m, int grid, double span_m) {
  const auto snap = [&](double v) {
    return std::clamp(static_cast<int>(std::lround(v / span_m * grid)), 0, grid);
  };
  return snap(y_m) * (grid + 1) + snap(x_m);
}

std::vector<double> tributary_areas(int grid, double span_m) {
  const int n = grid + 1;
  const double h = span_m / grid;
  std::vector<double> area(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double wx = (i == 0 || i == grid) ? 0.5 : 1.0;
      const double wy = (j == 0 || j == grid) ? 0.5 : 1.0;
      area[static_cast<std::size_t>(j * n + i)] = wx * wy * h * h;
    }
  }
  return area;
}

namespace {

std::vector<Eigen::Vector3d> lattice_normals(const Eigen::MatrixXd& z, double h) {
  const int n = static_cast<int>(z.rows());
  std::vector<Eigen::Vector3d> normals(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int i0 = std::max(i - 1, 0), i1 = std::min(i + 1, n - 1);
      const int j0 = std::max(j - 1, 0), j1 = std::min(j + 1, n - 1);
      const double zx = (z(i1, j) - z(i0, j)) / ((i1 - i0) * h);
      const double zy = (z(i, j1) - z(i, j0)) / ((j1 - j0) * h);
      normals[static_cast<std::size_t>(j * n + i)] = Eigen::Vector3d(-zx, -zy, 1.0).normalized();
    }
  }
  return normals;
}

}  // namespace

FrameModel frame_from_surface(const ShellSurface& surface, int grid, const ShellSection& section,
                              const Material& material) {
  if (grid < 2) throw ParameterError("frame lattice needs at least 2 divisions");
  const int n = grid + 1;
  const double span = surface.span_m();
  const double h = span / grid;
  const Eigen::MatrixXd z = surface.sample_lattice(n);

  FrameModel model;
  model.material = material;
  model.nodes.reserve(static_cast<std::size_t>(n * n));
  const auto xs = lattice_points(n, span);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      model.nodes.emplace_back(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)],
                               z(i, j));
    }
  }
  const auto normals = lattice_normals(z, h);
  const auto id = [n](int i, int j) { return j * n + i; };

  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) {
      const auto& p00 = model.nodes[static_cast<std::size_t>(id(i, j))];
      const auto& p10 = model.nodes[static_cast<std::size_t>(id(i + 1, j))];
      const auto& p11 = model.nodes[static_cast<std::size_t>(id(i + 1, j + 1))];
      const auto& p01 = model.nodes[static_cast<std::size_t>(id(i, j + 1))];
      const double a1 = (p10 - p00).cross(p11 - p00).norm();
      const double a2 = (p11 - p00).cross(p01 - p00).norm();
      if (!(a1 > 1e-12 * h * h) || !(a2 > 1e-12 * h * h)) {
        throw GeometryError(fmt::format("degenerate lattice cell ({}, {})", i, j));
      }
    }
  }

  const auto add = [&](int a, int b, double tributary) {
    FrameElement el;
    el.a = a;
    el.b = b;
    el.section = Section::rectangle(section.solid_fraction * tributary, section.thickness_m);
    el.orientation = normals[static_cast<std::size_t>(a)] + normals[static_cast<std::size_t>(b)];
    model.elements.push_back(el);
  };
  for (int j = 0; j < n; ++j) {
    const double w = (j == 0 || j == grid) ? 0.5 * h : h;
    for (int i = 0; i < grid; ++i) add(id(i, j), id(i + 1, j), w);
  }
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == grid) ? 0.5 * h : h;
    for (int j = 0; j < grid; ++j) add(id(i, j), id(i, j + 1), w);
  }
  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) add(id(i, j), id(i + 1, j + 1), h / std::numbers::sqrt2);
  }
  return model;
}

SupportLayout SupportLayout::corners(double span_m, SupportKind kind) {
  SupportLayout layout;
  layout.points = {{0.0, 0.0, kind}, {span_m, 0.0, kind}, {0.0, span_m, kind}, {span_m, span_m, kind}};
  return layout;
}

SupportLayout SupportLayout::perimeter(double span_m, int grid, SupportKind kind) {
  SupportLayout layout;
  const auto xs = lattice_points(grid + 1, span_m);
  for (int j = 0; j <= grid; ++j) {
    for (int i = 0; i <= grid; ++i) {
      if (i == 0 || j == 0 || i == grid || j == grid) {
        layout.points.push_back(
            {xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)], kind});
      }
    }
  }
  return layout;
}

ShellAnalysis analyze_shell(const ShellSurface& surface, const SupportLayout& supports,
                            const LoadCase& load, double precompression_N,
                            const AnalysisOptions& options) {
  const int grid = options.grid;
  const double span = surface.span_m();
  ShellAnalysis out;
  out.model = frame_from_surface(surface, grid, options.section, options.material);
  FrameModel& model = out.model;
  const int shell_nodes = static_cast<int>(model.nodes.size());

  std::vector<Eigen::Vector2d> support_plan;
  for (const auto& p : supports.points) {
    const int node = nearest_lattice_node(p.x_m, p.y_m, grid, span);
    model.supports[node] = p.kind;
    support_plan.emplace_back(model.nodes[static_cast<std::size_t>(node)].head<2>());
  }
  for (const auto& col : supports.columns) {
    const int top = nearest_lattice_node(col.x_m, col.y_m, grid, span);
    const Eigen::Vector3d top_pos = model.nodes[static_cast<std::size_t>(top)];
    support_plan.emplace_back(top_pos.head<2>());
    if (top_pos.z() < 1e-6) {
      model.supports[top] = SupportKind::Pinned;
      out.column_ground_nodes.push_back(-1);
      continue;
    }
    const int ground = static_cast<int>(model.nodes.size());
    model.nodes.emplace_back(top_pos.x(), top_pos.y(), 0.0);
    FrameElement el;
    el.a = ground;
    el.b = top;
    el.section = Section::rectangle(col.side_m, col.side_m);
    el.material = options.column_material;
    el.kind = col.role == ColumnRole::LoadBearing ? ElementKind::Beam : ElementKind::Truss;
    model.elements.push_back(el);
    model.supports[ground] = col.role == ColumnRole::LoadBearing ? SupportKind::Fixed
                                                                 : SupportKind::Pinned;
    out.column_ground_nodes.push_back(ground);
  }

  bool spread = false;
  for (std::size_t a = 0; a < support_plan.size() && !spread; ++a) {
    for (std::size_t b = a + 1; b < support_plan.size() && !spread; ++b) {
      for (std::size_t c = b + 1; c < support_plan.size() && !spread; ++c) {
        const Eigen::Vector2d u = support_plan[b] - support_plan[a];
        const Eigen::Vector2d v = support_plan[c] - support_plan[a];
        spread = std::abs(u.x() * v.y() - u.y() * v.x()) > 1e-9 * span * span;
      }
    }
  }
  if (!spread) throw ParameterError("at least three non-collinear supports are required");

  const auto trib = tributary_areas(grid, span);
  double trib_total = 0.0;
  for (const double a : trib) trib_total += a;
  const Eigen::MatrixXd z = surface.sample_lattice(grid + 1);
  const auto normals = lattice_normals(z, span / grid);

  std::vector<Eigen::Vector3d> forces(model.nodes.size(), Eigen::Vector3d::Zero());
  const double total_N = load.total_kN * 1e3;
  for (int node = 0; node < shell_nodes; ++node) {
    const double share = trib[static_cast<std::size_t>(node)] / trib_total;
    forces[static_cast<std::size_t>(node)] =
        Eigen::Vector3d(0.0, 0.0, -total_N * share) -
        precompression_N * share * normals[static_cast<std::size_t>(node)];
  }

  out.result = solve(model, forces);
  out.max_displacement_mm = out.result.max_translation_mm;
  out.limit_mm = deflection_limit_mm(options.span_m);
  out.pass = out.max_displacement_mm <= out.limit_mm;
  return out;
}

}  // namespace chainshell
