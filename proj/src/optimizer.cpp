#include "chainshell/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "chainshell/error.hpp"
#include "chainshell/loads.hpp"
#include "chainshell/rng.hpp"

namespace chainshell {

AnchorKind parse_anchor_kind(std::string_view text) {
  if (text == "one") return AnchorKind::One;
  if (text == "two_side") return AnchorKind::TwoSide;
  if (text == "two_diagonal") return AnchorKind::TwoDiagonal;
  if (text == "three") return AnchorKind::Three;
  if (text == "four") return AnchorKind::Four;
  throw ParameterError(fmt::format("unknown anchor kind '{}'", text));
}

std::string_view anchor_kind_name(AnchorKind kind) {
  switch (kind) {
    case AnchorKind::One: return "one";
    case AnchorKind::TwoSide: return "two_side";
    case AnchorKind::TwoDiagonal: return "two_diagonal";
    case AnchorKind::Three: return "three";
    case AnchorKind::Four: return "four";
  }
  return "?";
}

namespace {

std::size_t anchor_count(AnchorKind kind) {
  switch (kind) {
    case AnchorKind::One: return 1;
    case AnchorKind::TwoSide:
    case AnchorKind::TwoDiagonal: return 2;
    case AnchorKind::Three: return 3;
    case AnchorKind::Four: return 4;
  }
  return 0;
}

std::array<Eigen::Vector2d, 4> plan_corners(double span) {
  return {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(span, 0.0), Eigen::Vector2d(span, span),
          Eigen::Vector2d(0.0, span)};
}

}  // namespace

AnchorConfig AnchorConfig::make(AnchorKind kind, double span_m) {
  const auto c = plan_corners(span_m);
  AnchorConfig out;
  out.kind = kind;
  switch (kind) {
    case AnchorKind::One: out.points = {c[0]}; break;
    case AnchorKind::TwoSide: out.points = {c[0], c[1]}; break;
    case AnchorKind::TwoDiagonal: out.points = {c[0], c[2]}; break;
    case AnchorKind::Three: out.points = {c[0], c[1], c[2]}; break;
    case AnchorKind::Four: out.points = {c[0], c[1], c[2], c[3]}; break;
  }
  return out;
}

void AnchorConfig::validate(double span_m) const {
  if (points.size() != anchor_count(kind)) {
    throw ParameterError(fmt::format("anchor kind {} needs {} points, got {}",
                                     anchor_kind_name(kind), anchor_count(kind), points.size()));
  }
  const double eps = 1e-9 * span_m;
  for (const auto& p : points) {
    const bool inside = p.x() >= -eps && p.x() <= span_m + eps && p.y() >= -eps &&
                        p.y() <= span_m + eps;
    const bool on_edge = std::abs(p.x()) <= eps || std::abs(p.y()) <= eps ||
                         std::abs(p.x() - span_m) <= eps || std::abs(p.y() - span_m) <= eps;
    if (!inside || !on_edge) {
      throw ParameterError(fmt::format("anchor ({}, {}) is not on the plan boundary", p.x(), p.y()));
    }
  }
}

double ColumnSet::load_bearing_volume() const {
  double v = 0.0;
  for (const auto& c : load_bearing) v += c.volume_m3();
  return v;
}

double ColumnSet::formwork_volume() const {
  double v = 0.0;
  for (const auto& c : formwork) v += c.volume_m3();
  return v;
}

std::vector<Footprint> ColumnSet::footprints() const {
  std::vector<Footprint> out;
  for (const auto& c : load_bearing) out.push_back({c.x_m, c.y_m, c.side_m});
  for (const auto& c : formwork) out.push_back({c.x_m, c.y_m, c.side_m});
  return out;
}

void Weights::validate() const {
  for (const double w : {cms, ua, lc, fc}) {
    if (!(w >= 0.0)) throw ParameterError("weights must be non-negative");
  }
  const double sum = cms + ua + lc + fc;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ParameterError(fmt::format("weights must sum to 1, got {}", sum));
  }
}

void ShelterOptions::validate() const {
  if (!(span_m > 0.0)) throw ParameterError("span must be positive");
  if (!(amplitude_cap_m > 0.0)) throw ParameterError("amplitude cap must be positive");
  if (!(clear_height_m >= 0.0)) throw ParameterError("clear height must be non-negative");
  if (!(column_side_m > 0.0)) throw ParameterError("column side must be positive");
  if (control_divisions < 2) throw ParameterError("control divisions must be >= 2");
  if (resolution < control_divisions + 1) {
    throw ParameterError("resolution must cover the control lattice");
  }
  if (iterations < 1) throw ParameterError("iterations must be >= 1");
  if (!(min_amplitude_fraction > 0.0) || max_amplitude_fraction < min_amplitude_fraction) {
    throw ParameterError("amplitude fractions must satisfy 0 < min <= max");
  }
  if (!(anchor_radius_m > 0.0)) throw ParameterError("anchor radius must be positive");
  if (!(offset_divisor > 0.0)) throw ParameterError("offset divisor must be positive");
  if (!(slope_threshold > 0.0)) throw ParameterError("slope threshold must be positive");
  if (slope_points < 2) throw ParameterError("slope grid needs at least 2 points per side");
  if (usable_raster < 1) throw ParameterError("usable-area raster must be >= 1");
  if (anchor_kinds.empty()) throw ParameterError("no anchor kinds selected");
  if (fem_grid < 2) throw ParameterError("fem grid must be >= 2");
  if (!(reduction_tolerance >= 0.0)) throw ParameterError("reduction tolerance must be >= 0");
  if (fit_resolution < 2) throw ParameterError("fit resolution must be >= 2");
  weights.validate();
}

SlopeReport slope_grid(const Eigen::MatrixXd& heights, double span_m, double threshold,
                       DrainageRule rule) {
  const int n = static_cast<int>(heights.rows());
  if (n < 2 || heights.cols() != n) throw ParameterError("slope grid must be square, n >= 2");
  const double d = span_m / (n - 1);
  SlopeReport out;
  out.heights = heights;
  out.steepest = Eigen::MatrixXd::Zero(n, n);
  out.shallowest = Eigen::MatrixXd::Zero(n, n);
  const int di[] = {1, -1, 0, 0};
  const int dj[] = {0, 0, 1, -1};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double hi = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 4; ++k) {
        const int a = i + di[k], b = j + dj[k];
        if (a < 0 || b < 0 || a >= n || b >= n) continue;
        const double s = std::abs(heights(a, b) - heights(i, j)) / d;
        hi = std::max(hi, s);
        lo = std::min(lo, s);
      }
      out.steepest(i, j) = hi;
      out.shallowest(i, j) = lo;
    }
  }
  const Eigen::MatrixXd& tested = rule == DrainageRule::Ponding ? out.steepest : out.shallowest;
  out.min_slope = tested.minCoeff();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (tested(i, j) < threshold) out.failing_points.emplace_back(i * d, j * d);
    }
  }
  out.pass = out.failing_points.empty();
  return out;
}

SlopeReport slope_grid(const ShellSurface& surface, int points, double threshold,
                       DrainageRule rule) {
  return slope_grid(surface.sample_lattice(points), surface.span_m(), threshold, rule);
}

double usable_area(const ShellSurface& surface, const ColumnSet& columns, double clear_height_m,
                   int raster) {
  if (raster < 1) throw ParameterError("raster must be >= 1");
  const double span = surface.span_m();
  const double cell = span / raster;
  std::vector<double> xs(static_cast<std::size_t>(raster));
  for (int k = 0; k < raster; ++k) xs[static_cast<std::size_t>(k)] = (k + 0.5) * cell;
  const Eigen::MatrixXd h = surface.sample(xs, xs);
  const long blocked = kernels::omp::obstructed_cells(h, clear_height_m, cell, columns.footprints());
  return span * span - static_cast<double>(blocked) * cell * cell;
}

std::vector<double> grade(std::span<const double> values, Orientation orientation) {
  if (values.empty()) throw ParameterError("grade needs at least one value");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double best = orientation == Orientation::MinimizeBest ? *lo : *hi;
  const double worst = orientation == Orientation::MinimizeBest ? *hi : *lo;
  std::vector<double> out(values.size(), 100.0);
  if (*hi == *lo) return out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    out[k] = 1.0 + 99.0 * (worst - values[k]) / (worst - best);
  }
  return out;
}

namespace {

// Volume when it separates the cohort, otherwise the count.
std::vector<double> column_key(std::span<const DesignMetrics> m,
                               std::span<const std::size_t> members, bool load_bearing) {
  std::vector<double> vol, count;
  for (const auto k : members) {
    vol.push_back(load_bearing ? m[k].lc_volume_m3 : m[k].fc_volume_m3);
    count.push_back(load_bearing ? m[k].lc_count : m[k].fc_count);
  }
  const auto [lo, hi] = std::minmax_element(vol.begin(), vol.end());
  return *lo == *hi ? count : vol;
}

}  // namespace

Ranking rank_designs(std::span<const DesignMetrics> metrics, const Weights& weights) {
  weights.validate();
  Ranking out;
  std::vector<std::size_t> alive;
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    (metrics[k].drainage_pass ? alive : out.rejected).push_back(k);
  }
  if (alive.empty()) return out;

  std::vector<double> cms, ua;
  for (const auto k : alive) {
    cms.push_back(metrics[k].cms_m2);
    ua.push_back(metrics[k].ua_m2);
  }
  const auto g_cms = grade(cms, Orientation::MinimizeBest);
  const auto g_ua = grade(ua, Orientation::MaximizeBest);
  const auto g_lc = grade(column_key(metrics, alive, true), Orientation::MinimizeBest);
  const auto g_fc = grade(column_key(metrics, alive, false), Orientation::MinimizeBest);

  for (std::size_t s = 0; s < alive.size(); ++s) {
    RankedEntry e;
    e.index = alive[s];
    e.grades = {g_cms[s], g_ua[s], g_lc[s], g_fc[s]};
    e.score = weights.cms * e.grades.cms + weights.ua * e.grades.ua + weights.lc * e.grades.lc +
              weights.fc * e.grades.fc;
    out.entries.push_back(e);
  }
  std::sort(out.entries.begin(), out.entries.end(), [&](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    const auto& ma = metrics[a.index];
    const auto& mb = metrics[b.index];
    if (ma.cms_m2 != mb.cms_m2) return ma.cms_m2 < mb.cms_m2;
    if (ma.ua_m2 != mb.ua_m2) return ma.ua_m2 > mb.ua_m2;
    return a.index < b.index;
  });
  for (std::size_t r = 0; r < out.entries.size(); ++r) out.entries[r].rank = static_cast<int>(r) + 1;
  return out;
}

ShellSurface shelter_surface(const AnchorConfig& anchors, int iteration, std::uint64_t seed,
                             const ShelterOptions& options) {
  const int f = options.control_divisions;
  const int n = f + 1;
  const double span = options.span_m;
  const double cap = options.amplitude_cap_m;
  const double c = 0.5 * span;
  const std::uint64_t stream =
      (static_cast<std::uint64_t>(anchors.kind) << 32) | static_cast<std::uint32_t>(iteration);

  const double frac = options.min_amplitude_fraction +
                      (options.max_amplitude_fraction - options.min_amplitude_fraction) *
                          keyed_uniform(seed, stream, 0);
  const double amplitude = frac * cap;
  const double sigma2 = options.anchor_radius_m * options.anchor_radius_m;

  ControlGrid grid;
  grid.divisions = f;
  grid.amplitude_mm = std::min(amplitude, cap) * 1e3;
  grid.frequency = 0;
  grid.span_mm = span * 1e3;
  grid.seed = seed;
  grid.iteration = iteration;
  grid.z_mm.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = span * i / f, y = span * j / f;
      const double r2 = (x - c) * (x - c) + (y - c) * (y - c);
      const double dome = 1.0 - options.crown_drop * r2 / (2.0 * c * c);
      double draw = 1.0;
      for (const auto& a : anchors.points) {
        const double d2 = (x - a.x()) * (x - a.x()) + (y - a.y()) * (y - a.y());
        draw *= 1.0 - std::exp(-d2 / sigma2);
      }
      const double u = keyed_uniform(seed, stream, 1 + static_cast<std::uint64_t>(j * n + i));
      const double z = draw * (amplitude * dome + amplitude / options.offset_divisor * u);
      grid.z_mm(i, j) = std::clamp(z, 0.0, cap) * 1e3;
    }
  }
  ShellSurface surface(grid, options.resolution);
  if (surface.max_height_m() <= cap) return surface;
  grid.z_mm *= cap / surface.max_height_m() * (1.0 - 1e-12);
  return ShellSurface(grid, options.resolution);
}

ColumnSet initial_columns(const ShellSurface& surface, const AnchorConfig& anchors,
                          double side_m) {
  const double span = surface.span_m();
  const auto corners = plan_corners(span);
  std::array<double, 4> pos{};
  for (int k = 0; k < 4; ++k) pos[static_cast<std::size_t>(k)] = span * (0.125 + 0.25 * k);

  // Grid index of the column nearest each corner.
  const std::array<std::pair<int, int>, 4> nearest{{{0, 0}, {3, 0}, {3, 3}, {0, 3}}};
  std::array<bool, 16> bearing{};
  for (int k = 0; k < 4; ++k) {
    const auto& corner = corners[static_cast<std::size_t>(k)];
    const bool anchored = std::any_of(anchors.points.begin(), anchors.points.end(),
                                      [&](const Eigen::Vector2d& a) { return (a - corner).norm() < 1e-9; });
    if (!anchored) {
      const auto [i, j] = nearest[static_cast<std::size_t>(k)];
      bearing[static_cast<std::size_t>(j * 4 + i)] = true;
    }
  }

  ColumnSet out;
  for (int k = 0; k < 4; ++k) {
    const auto [i, j] = nearest[static_cast<std::size_t>(k)];
    if (!bearing[static_cast<std::size_t>(j * 4 + i)]) continue;
    const double x = pos[static_cast<std::size_t>(i)], y = pos[static_cast<std::size_t>(j)];
    out.load_bearing.push_back({x, y, std::max(surface.height_at(x, y), 0.0), side_m});
  }
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) {
      if (bearing[static_cast<std::size_t>(j * 4 + i)]) continue;
      const double x = pos[static_cast<std::size_t>(i)], y = pos[static_cast<std::size_t>(j)];
      out.formwork.push_back({x, y, std::max(surface.height_at(x, y), 0.0), side_m});
    }
  }
  return out;
}

CandidateDesign make_candidate(int id, const AnchorConfig& anchors, int iteration,
                               std::uint64_t seed, const ShelterOptions& options) {
  ShellSurface surface = shelter_surface(anchors, iteration, seed, options);
  ColumnSet columns = initial_columns(surface, anchors, options.column_side_m);
  SlopeReport slope =
      slope_grid(surface, options.slope_points, options.slope_threshold, options.drainage);

  DesignMetrics m;
  m.cms_m2 = measure(surface).area_m2;
  m.ua_m2 = usable_area(surface, columns, options.clear_height_m, options.usable_raster);
  m.lc_volume_m3 = columns.load_bearing_volume();
  m.lc_count = static_cast<int>(columns.load_bearing.size());
  m.fc_volume_m3 = columns.formwork_volume();
  m.fc_count = static_cast<int>(columns.formwork.size());
  m.min_slope = slope.min_slope;
  m.drainage_pass = slope.pass;
  return CandidateDesign{id,      iteration,   anchors, std::move(surface), std::move(columns),
                         std::move(slope), m, std::nullopt, std::nullopt};
}

namespace {

double tps_kernel(double r2) { return r2 > 0.0 ? 0.5 * r2 * std::log(r2) : 0.0; }

struct ThinPlate {
  std::vector<Eigen::Vector3d> points;
  Eigen::VectorXd coeff;

  explicit ThinPlate(std::vector<Eigen::Vector3d> pts) : points(std::move(pts)) {
    const int m = static_cast<int>(points.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 3, m + 3);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 3);
    for (int r = 0; r < m; ++r) {
      const auto& p = points[static_cast<std::size_t>(r)];
      for (int c = 0; c < m; ++c) {
        a(r, c) = tps_kernel((p.head<2>() - points[static_cast<std::size_t>(c)].head<2>()).squaredNorm());
      }
      a(r, m) = a(m, r) = 1.0;
      a(r, m + 1) = a(m + 1, r) = p.x();
      a(r, m + 2) = a(m + 2, r) = p.y();
      rhs(r) = p.z();
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
      throw GeometryError("supported-surface fit needs three non-collinear distinct supports");
    }
    coeff = lu.solve(rhs);
  }

  double operator()(double x, double y) const {
    const int m = static_cast<int>(points.size());
    double z = coeff(m) + coeff(m + 1) * x + coeff(m + 2) * y;
    for (int k = 0; k < m; ++k) {
      const auto& p = points[static_cast<std::size_t>(k)];
      z += coeff(k) * tps_kernel((x - p.x()) * (x - p.x()) + (y - p.y()) * (y - p.y()));
    }
    return z;
  }
};

}  // namespace

TriMesh supported_surface(const AnchorConfig& anchors, const ColumnSet& columns, double span_m,
                          int resolution) {
  if (resolution < 2) throw ParameterError("fit resolution must be >= 2");
  std::vector<Eigen::Vector3d> pts;
  for (const auto& a : anchors.points) pts.emplace_back(a.x(), a.y(), 0.0);
  for (const auto& c : columns.load_bearing) pts.emplace_back(c.x_m, c.y_m, c.height_m);
  for (const auto& c : columns.formwork) pts.emplace_back(c.x_m, c.y_m, c.height_m);
  const ThinPlate fit(std::move(pts));
  const auto xs = lattice_points(resolution, span_m);
  Eigen::MatrixXd h(resolution, resolution);
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      h(i, j) = fit(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]);
    }
  }
  return height_field_mesh(h, span_m);
}

SurfaceMetrics supported_metrics(const AnchorConfig& anchors, const ColumnSet& columns,
                                 double span_m, int resolution) {
  return measure(supported_surface(anchors, columns, span_m, resolution));
}

ReductionResult reduce_formwork(const CandidateDesign& design, const SurfaceMetrics& reference,
                                double delta_p, double delta_a,
                                std::span<const double> order_keys, int fit_resolution) {
  const auto& all = design.columns.formwork;
  if (order_keys.size() != all.size()) {
    throw ParameterError(fmt::format("expected {} ordering keys, got {}", all.size(),
                                     order_keys.size()));
  }
  if (delta_p < 0.0 || delta_a < 0.0) throw ParameterError("tolerances must be non-negative");
  const double span = design.surface.span_m();

  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(order_keys[a]) < std::abs(order_keys[b]);
  });

  std::vector<bool> kept(all.size(), true);
  const auto assemble = [&](const std::vector<bool>& mask) {
    ColumnSet set;
    set.load_bearing = design.columns.load_bearing;
    for (std::size_t k = 0; k < all.size(); ++k) {
      if (mask[k]) set.formwork.push_back(all[k]);
    }
    return set;
  };

  ReductionResult out;
  out.reference = reference;
  out.final = supported_metrics(design.anchors, design.columns, span, fit_resolution);
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto k : order) {
      if (!kept[k]) continue;
      auto trial = kept;
      trial[k] = false;
      SurfaceMetrics m;
      try {
        m = supported_metrics(design.anchors, assemble(trial), span, fit_resolution);
      } catch (const GeometryError&) {
        continue;
      }
      if (std::abs(m.perimeter_m - reference.perimeter_m) <= delta_p &&
          std::abs(m.area_m2 - reference.area_m2) <= delta_a) {
        kept = std::move(trial);
        out.removed.push_back(k);
        out.final = m;
        progress = true;
        break;
      }
    }
  }
  out.columns = assemble(kept);
  return out;
}

SupportLayout shelter_supports(const AnchorConfig& anchors, const ColumnSet& columns) {
  SupportLayout layout;
  for (const auto& a : anchors.points) layout.points.push_back({a.x(), a.y(), SupportKind::Pinned});
  for (const auto& c : columns.load_bearing) {
    layout.columns.push_back({c.x_m, c.y_m, c.side_m, ColumnRole::LoadBearing});
  }
  for (const auto& c : columns.formwork) {
    layout.columns.push_back({c.x_m, c.y_m, c.side_m, ColumnRole::Formwork});
  }
  return layout;
}

std::vector<double> formwork_reactions(const ShellAnalysis& analysis, const ColumnSet& columns,
                                       int grid, double span_m) {
  std::vector<double> out;
  const std::size_t first = columns.load_bearing.size();
  for (std::size_t k = 0; k < columns.formwork.size(); ++k) {
    int node = analysis.column_ground_nodes.at(first + k);
    if (node < 0) {
      node = nearest_lattice_node(columns.formwork[k].x_m, columns.formwork[k].y_m, grid, span_m);
    }
    const auto it = analysis.result.reactions_kN.find(node);
    out.push_back(it == analysis.result.reactions_kN.end() ? 0.0 : it->second.z());
  }
  return out;
}

ShellAnalysis analyze_shelter(const CandidateDesign& design, const ColumnSet& columns,
                              const ShelterOptions& options) {
  StructureSpec spec;
  spec.plan_area_m2 = options.span_m * options.span_m;
  spec.span_m = options.span_m;
  const LoadCase load = load_case(spec, design.metrics.cms_m2);
  AnalysisOptions ao;
  ao.grid = options.fem_grid;
  ao.span_m = options.span_m;
  return analyze_shell(design.surface, shelter_supports(design.anchors, columns), load, 1.0, ao);
}

OptimizationReport optimize(const ShelterOptions& options, std::uint64_t seed) {
  options.validate();
  const int kinds = static_cast<int>(options.anchor_kinds.size());
  const int total = kinds * options.iterations;

  std::vector<std::optional<CandidateDesign>> slots(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic)
  for (int id = 0; id < total; ++id) {
    const auto kind = options.anchor_kinds[static_cast<std::size_t>(id / options.iterations)];
    slots[static_cast<std::size_t>(id)] =
        make_candidate(id, AnchorConfig::make(kind, options.span_m), id % options.iterations,
                       seed, options);
  }

  OptimizationReport report;
  std::vector<DesignMetrics> metrics;
  for (auto& s : slots) {
    metrics.push_back(s->metrics);
    report.candidates.push_back(std::move(*s));
  }
  report.ranking = rank_designs(metrics, options.weights);
  for (const auto& e : report.ranking.entries) {
    report.candidates[e.index].grades = e.grades;
    report.candidates[e.index].weighted_score = e.score;
  }
  if (report.ranking.all_rejected()) return report;

  const std::size_t w = report.ranking.entries.front().index;
  report.winner = w;
  const auto& design = report.candidates[w];

  const ShellAnalysis full = analyze_shelter(design, design.columns, options);
  report.reactions_kN = formwork_reactions(full, design.columns, options.fem_grid, options.span_m);
  const SurfaceMetrics ref =
      supported_metrics(design.anchors, design.columns, options.span_m, options.fit_resolution);
  report.reduction = reduce_formwork(design, ref, options.reduction_tolerance * ref.perimeter_m,
                                     options.reduction_tolerance * ref.area_m2, report.reactions_kN,
                                     options.fit_resolution);
  report.analysis = analyze_shelter(design, report.reduction->columns, options);
  return report;
}

void write_ranking_csv(std::ostream& out, const OptimizationReport& report) {
  out << "candidate_id,anchor_kind,iteration,CMS_m2,UA_m2,LC_vol_m3,LC_n,FC_vol_m3,FC_n,"
         "min_slope,drainage_pass,grade_CMS,grade_UA,grade_LC,grade_FC,weighted_score,rank\n";
  const auto base = [&](const CandidateDesign& c) {
    const auto& m = c.metrics;
    return fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{},{:.6f},{},{:.6f},{}", c.id,
                       anchor_kind_name(c.anchors.kind), c.iteration, m.cms_m2, m.ua_m2,
                       m.lc_volume_m3, m.lc_count, m.fc_volume_m3, m.fc_count, m.min_slope,
                       m.drainage_pass ? "true" : "false");
  };
  for (const auto& e : report.ranking.entries) {
    out << base(report.candidates[e.index])
        << fmt::format(",{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", e.grades.cms, e.grades.ua,
                       e.grades.lc, e.grades.fc, e.score, e.rank);
  }
  for (const auto k : report.ranking.rejected) out << base(report.candidates[k]) << ",,,,,,\n";
}

}  // namespace chainshell
