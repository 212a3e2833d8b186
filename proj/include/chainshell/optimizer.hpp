#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chainshell/fem.hpp"
#include "chainshell/filter.hpp"
#include "chainshell/kernels.hpp"
#include "chainshell/shell3d.hpp"

namespace chainshell {

enum class AnchorKind { One, TwoSide, TwoDiagonal, Three, Four };

AnchorKind parse_anchor_kind(std::string_view text);
std::string_view anchor_kind_name(AnchorKind kind);
inline constexpr AnchorKind kAllAnchorKinds[] = {AnchorKind::One, AnchorKind::TwoSide,
                                                 AnchorKind::TwoDiagonal, AnchorKind::Three,
                                                 AnchorKind::Four};

/// Ground-level pins at plan corners. Corners are numbered counter-clockwise
/// from the origin: (0,0), (L,0), (L,L), (0,L).
struct AnchorConfig {
  AnchorKind kind = AnchorKind::Four;
  std::vector<Eigen::Vector2d> points;

  static AnchorConfig make(AnchorKind kind, double span_m);
  /// Throws ParameterError when the count does not match the kind or a point
  /// is off the plan boundary.
  void validate(double span_m) const;
};

struct Column {
  double x_m = 0.0;
  double y_m = 0.0;
  double height_m = 0.0;
  double side_m = 0.05;

  double area_m2() const { return side_m * side_m; }
  double volume_m3() const { return area_m2() * height_m; }
};

struct ColumnSet {
  std::vector<Column> load_bearing;
  std::vector<Column> formwork;

  double load_bearing_volume() const;
  double formwork_volume() const;
  std::size_t size() const { return load_bearing.size() + formwork.size(); }
  std::vector<Footprint> footprints() const;
};

enum class DrainageRule {
  Ponding,  ///< a point fails iff no neighbour slope reaches the threshold
  Strict    ///< a point fails iff any neighbour slope is below the threshold
};

struct Weights {
  double cms = 0.4;
  double ua = 0.4;
  double lc = 0.1;
  double fc = 0.1;

  /// Throws ParameterError unless all weights are >= 0 and sum to 1.
  void validate() const;
};

struct ShelterOptions {
  double span_m = 2.0;
  double amplitude_cap_m = 3.0;
  double clear_height_m = 1.5;
  double column_side_m = 0.05;
  int control_divisions = 8;
  int resolution = 64;
  int iterations = 20;
  /// Crown height is drawn from [min, max] x cap, then capped.
  double min_amplitude_fraction = 0.5;
  double max_amplitude_fraction = 1.2;
  double crown_drop = 0.3;       ///< fractional drop from crown to plan corner
  double anchor_radius_m = 0.6;  ///< width of the draw-down around an anchor
  double offset_divisor = 5.0;   ///< random offsets lie in [0, A / offset_divisor]
  double slope_threshold = 0.02;
  int slope_points = 10;
  DrainageRule drainage = DrainageRule::Ponding;
  int usable_raster = 100;
  Weights weights;
  std::vector<AnchorKind> anchor_kinds{std::begin(kAllAnchorKinds), std::end(kAllAnchorKinds)};
  int fem_grid = 16;
  double reduction_tolerance = 0.005;  ///< fraction of the reference P and a
  int fit_resolution = 33;

  void validate() const;
};

/// Drainage check on an n x n lattice. slope(i, j) is the steepest slope from
/// point (i, j) to one of its 4-neighbours; `min_slope` is the smallest
/// value the active rule tests against the threshold.
struct SlopeReport {
  Eigen::MatrixXd heights;
  Eigen::MatrixXd steepest;
  Eigen::MatrixXd shallowest;
  std::vector<Eigen::Vector2d> failing_points;
  double min_slope = 0.0;
  bool pass = false;
};

SlopeReport slope_grid(const ShellSurface& surface, int points = 10, double threshold = 0.02,
                       DrainageRule rule = DrainageRule::Ponding);
SlopeReport slope_grid(const Eigen::MatrixXd& heights, double span_m, double threshold = 0.02,
                       DrainageRule rule = DrainageRule::Ponding);

/// Plan area with clear height >= clear_height and outside every column
/// footprint, on a raster x raster grid of cell centres.
double usable_area(const ShellSurface& surface, const ColumnSet& columns,
                   double clear_height_m = 1.5, int raster = 100);

enum class Orientation { MinimizeBest, MaximizeBest };

/// Best value -> 100, worst -> 1, linear in between; all-equal -> 100.
std::vector<double> grade(std::span<const double> values, Orientation orientation);

struct DesignMetrics {
  double cms_m2 = 0.0;
  double ua_m2 = 0.0;
  double lc_volume_m3 = 0.0;
  int lc_count = 0;
  double fc_volume_m3 = 0.0;
  int fc_count = 0;
  double min_slope = 0.0;
  bool drainage_pass = false;
};

struct Grades {
  double cms = 0.0;
  double ua = 0.0;
  double lc = 0.0;
  double fc = 0.0;
};

struct CandidateDesign {
  int id = 0;
  int iteration = 0;
  AnchorConfig anchors;
  ShellSurface surface;
  ColumnSet columns;
  SlopeReport slope;
  DesignMetrics metrics;
  std::optional<Grades> grades;
  std::optional<double> weighted_score;
};

struct RankedEntry {
  std::size_t index = 0;  ///< position in the input list
  Grades grades;
  double score = 0.0;
  int rank = 0;
};

struct Ranking {
  std::vector<RankedEntry> entries;   ///< best first
  std::vector<std::size_t> rejected;  ///< drainage failures, input order
  bool all_rejected() const { return entries.empty(); }
};

Ranking rank_designs(std::span<const DesignMetrics> metrics, const Weights& weights = {});

/// Shelter surface for one anchor layout: a capped dome drawn down to z = 0
/// at the anchors, plus keyed offsets on the control points. Control heights
/// stay in [0, cap] and anchor control points are 0; the surface is rescaled
/// when the interpolant overshoots the cap.
ShellSurface shelter_surface(const AnchorConfig& anchors, int iteration, std::uint64_t seed,
                             const ShelterOptions& options = {});

/// 16 columns on the 4 x 4 grid at 0.25, 0.75, 1.25, 1.75 (scaled to the
/// span). The column nearest each unanchored plan corner is load-bearing.
ColumnSet initial_columns(const ShellSurface& surface, const AnchorConfig& anchors,
                          double side_m = 0.05);

CandidateDesign make_candidate(int id, const AnchorConfig& anchors, int iteration,
                               std::uint64_t seed, const ShelterOptions& options = {});

/// Surface of the vacuum-jammed sheet resting on the anchors (z = 0) and the
/// column tops, fitted with a thin-plate spline and measured on a
/// resolution x resolution lattice.
TriMesh supported_surface(const AnchorConfig& anchors, const ColumnSet& columns, double span_m,
                          int resolution = 33);
SurfaceMetrics supported_metrics(const AnchorConfig& anchors, const ColumnSet& columns,
                                 double span_m, int resolution = 33);

struct ReductionResult {
  ColumnSet columns;
  std::vector<std::size_t> removed;  ///< original formwork indices, removal order
  SurfaceMetrics reference;
  SurfaceMetrics final;
};

/// Greedy formwork removal. `order_keys` holds one value per formwork column
/// (its vertical reaction); candidates are tried by ascending |key|. A removal
/// stands iff the re-fitted supported surface keeps |P - P_ref| <= delta_p and
/// |a - a_ref| <= delta_a. Load-bearing columns are never touched.
ReductionResult reduce_formwork(const CandidateDesign& design, const SurfaceMetrics& reference,
                                double delta_p, double delta_a,
                                std::span<const double> order_keys, int fit_resolution = 33);

/// Supports for the structural model: pinned anchors, fixed load-bearing
/// columns and pinned formwork struts.
SupportLayout shelter_supports(const AnchorConfig& anchors, const ColumnSet& columns);

/// Vertical reaction (kN) carried by each formwork column.
std::vector<double> formwork_reactions(const ShellAnalysis& analysis, const ColumnSet& columns,
                                       int grid, double span_m);

ShellAnalysis analyze_shelter(const CandidateDesign& design, const ColumnSet& columns,
                              const ShelterOptions& options = {});

struct OptimizationReport {
  std::vector<CandidateDesign> candidates;
  Ranking ranking;
  std::optional<std::size_t> winner;  ///< index into candidates
  std::optional<ReductionResult> reduction;
  std::optional<ShellAnalysis> analysis;
  std::vector<double> reactions_kN;  ///< per initial formwork column of the winner
};

OptimizationReport optimize(const ShelterOptions& options, std::uint64_t seed);

/// ranking.csv: ranked rows best first, then rejected rows in input order with
/// empty grade, score and rank fields.
void write_ranking_csv(std::ostream& out, const OptimizationReport& report);

}  // namespace chainshell
