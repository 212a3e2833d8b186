#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "chainshell/error.hpp"
#include "chainshell/kernels.hpp"
#include "chainshell/optimizer.hpp"
#include "chainshell/rng.hpp"

using namespace chainshell;

namespace {

// z = H g(x) g(y), g(t) = 4 t (L - t) / L^2; reproduced exactly by the spline.
ShellSurface cap_surface(double height_m, double span_m = 2.0, int divisions = 8) {
  ControlGrid g;
  g.divisions = divisions;
  g.span_mm = span_m * 1e3;
  g.z_mm.resize(divisions + 1, divisions + 1);
  for (int i = 0; i <= divisions; ++i) {
    for (int j = 0; j <= divisions; ++j) {
      const double u = static_cast<double>(i) / divisions, v = static_cast<double>(j) / divisions;
      g.z_mm(i, j) = 1e3 * height_m * 16.0 * u * (1 - u) * v * (1 - v);
    }
  }
  return ShellSurface(g, 64);
}

// Plan area where H g(x) g(y) >= c, integrated along x with the exact y chord.
double cap_level_area(double height_m, double clear_m, double span_m) {
  const double c = clear_m / height_m;
  const int n = 200000;
  double area = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = (k + 0.5) / n * span_m;
    const double gx = 4.0 * x * (span_m - x) / (span_m * span_m);
    if (gx < c) continue;
    area += span_m * std::sqrt(1.0 - c / gx) * span_m / n;
  }
  return area;
}

DesignMetrics metrics(double cms, double ua, double lc, double fc, bool pass = true) {
  DesignMetrics m;
  m.cms_m2 = cms;
  m.ua_m2 = ua;
  m.lc_volume_m3 = lc;
  m.lc_count = 1;
  m.fc_volume_m3 = fc;
  m.fc_count = 1;
  m.min_slope = pass ? 0.05 : 0.0;
  m.drainage_pass = pass;
  return m;
}

struct ThreadGuard {
  int saved = thread_count();
  ~ThreadGuard() { set_thread_count(saved); }
};

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("anchor layouts") {
  CHECK(AnchorConfig::make(AnchorKind::One, 2.0).points.size() == 1);
  CHECK(AnchorConfig::make(AnchorKind::TwoDiagonal, 2.0).points[1] == Eigen::Vector2d(2.0, 2.0));
  CHECK(AnchorConfig::make(AnchorKind::Four, 2.0).points.size() == 4);
  for (auto kind : kAllAnchorKinds) CHECK(parse_anchor_kind(anchor_kind_name(kind)) == kind);
  CHECK_THROWS_AS(parse_anchor_kind("five"), ParameterError);
  AnchorConfig bad{AnchorKind::One, {Eigen::Vector2d(1.0, 1.0)}};
  CHECK_THROWS_AS(bad.validate(2.0), ParameterError);
}

TEST_CASE("weights must sum to one") {
  Weights w{0.3, 0.4, 0.1, 0.1};
  CHECK_THROWS_AS(w.validate(), ParameterError);
  w.cms = 0.4;
  CHECK_NOTHROW(w.validate());
}

TEST_CASE("slope grid on a flat surface fails everywhere") {
  const auto r = slope_grid(Eigen::MatrixXd::Zero(10, 10), 2.0);
  CHECK(r.min_slope == 0.0);
  CHECK(r.failing_points.size() == 100);
  CHECK_FALSE(r.pass);
}

TEST_CASE("slope grid on a three percent plane") {
  Eigen::MatrixXd h(10, 10);
  for (int i = 0; i < 10; ++i) h.row(i).setConstant(0.03 * 2.0 * i / 9);
  const auto ponding = slope_grid(h, 2.0, 0.02, DrainageRule::Ponding);
  CHECK(ponding.pass);
  CHECK(ponding.min_slope == doctest::Approx(0.03));
  const auto strict = slope_grid(h, 2.0, 0.02, DrainageRule::Strict);
  CHECK_FALSE(strict.pass);
  CHECK(strict.min_slope == 0.0);
}

TEST_CASE("slope grid agrees with a brute-force neighbour scan") {
  Eigen::MatrixXd h(12, 12);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) h(i, j) = 0.1 * keyed_uniform(5, 0, static_cast<std::uint64_t>(i * 12 + j));
  }
  const double d = 2.0 / 11;
  for (auto rule : {DrainageRule::Ponding, DrainageRule::Strict}) {
    const auto r = slope_grid(h, 2.0, 0.02, rule);
    std::size_t failing = 0;
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) {
        std::vector<double> s;
        if (i > 0) s.push_back(std::abs(h(i - 1, j) - h(i, j)) / d);
        if (i < 11) s.push_back(std::abs(h(i + 1, j) - h(i, j)) / d);
        if (j > 0) s.push_back(std::abs(h(i, j - 1) - h(i, j)) / d);
        if (j < 11) s.push_back(std::abs(h(i, j + 1) - h(i, j)) / d);
        const double v = rule == DrainageRule::Ponding ? *std::max_element(s.begin(), s.end())
                                                       : *std::min_element(s.begin(), s.end());
        if (v < 0.02) ++failing;
      }
    }
    CHECK(r.failing_points.size() == failing);
  }
}

TEST_CASE("usable area extremes") {
  const ColumnSet none;
  CHECK(usable_area(cap_surface(0.5), none, 1.5, 50) == 0.0);
  // raising the whole sheet above the clear height
  ControlGrid high = field_control_grid(0.0, 3, 4);
  high.z_mm.setConstant(2000.0);
  const ShellSurface lid(high, 16);
  CHECK(usable_area(lid, none, 1.5, 50) == doctest::Approx(4.0));
  ColumnSet one;
  one.formwork.push_back({1.0, 1.0, 2.0, 0.2});
  CHECK(usable_area(lid, one, 1.5, 100) == doctest::Approx(4.0 - 0.04).epsilon(0.01));
}

TEST_CASE("usable area of a cap matches its level set") {
  const auto s = cap_surface(3.0);
  const double exact = cap_level_area(3.0, 1.5, 2.0);
  CHECK(usable_area(s, {}, 1.5, 100) == doctest::Approx(exact).epsilon(0.02));
  CHECK(usable_area(s, {}, 1.5, 400) == doctest::Approx(exact).epsilon(0.005));
}

TEST_CASE("usable area never grows with more columns") {
  const auto s = cap_surface(3.0);
  ColumnSet cols;
  double last = usable_area(s, cols);
  for (int k = 0; k < 6; ++k) {
    cols.formwork.push_back({0.3 + 0.25 * k, 1.0, 2.0, 0.05});
    const double now = usable_area(s, cols);
    CHECK(now <= last);
    last = now;
  }
}

TEST_CASE("grade examples") {
  const std::vector<double> v{1.0, 2.0, 3.0};
  const auto lo = grade(v, Orientation::MinimizeBest);
  CHECK(lo[0] == 100.0);
  CHECK(lo[1] == doctest::Approx(50.5));
  CHECK(lo[2] == 1.0);
  const auto hi = grade(v, Orientation::MaximizeBest);
  CHECK(hi[0] == 1.0);
  CHECK(hi[2] == 100.0);
  const std::vector<double> same{4.0, 4.0};
  CHECK(grade(same, Orientation::MinimizeBest) == std::vector<double>{100.0, 100.0});
}

TEST_CASE("grades are invariant under positive affine maps") {
  const std::vector<double> v{0.3, 1.7, 0.9, 2.2, 1.1};
  std::vector<double> w;
  for (double x : v) w.push_back(3.0 * x + 7.0);
  const auto a = grade(v, Orientation::MaximizeBest), b = grade(w, Orientation::MaximizeBest);
  for (std::size_t k = 0; k < v.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]));
}

TEST_CASE("a single candidate scores 100") {
  const std::vector<DesignMetrics> m{metrics(5.0, 2.0, 0.01, 0.02)};
  const auto r = rank_designs(m);
  REQUIRE(r.entries.size() == 1);
  CHECK(r.entries[0].score == doctest::Approx(100.0));
  CHECK(r.entries[0].rank == 1);
}

TEST_CASE("smaller surface wins when everything else ties") {
  const std::vector<DesignMetrics> m{metrics(5.5, 2.0, 0.01, 0.02), metrics(5.0, 2.0, 0.01, 0.02)};
  const auto r = rank_designs(m);
  CHECK(r.entries[0].index == 1);
  CHECK(r.entries[0].score > r.entries[1].score);
}

TEST_CASE("drainage failures do not affect the others' grades") {
  std::vector<DesignMetrics> m{metrics(5.5, 2.0, 0.01, 0.02), metrics(5.0, 1.5, 0.02, 0.01),
                               metrics(6.0, 2.5, 0.0, 0.03)};
  const auto before = rank_designs(m);
  m.insert(m.begin() + 1, metrics(1.0, 4.0, 0.0, 0.0, false));
  const auto after = rank_designs(m);
  REQUIRE(after.rejected == std::vector<std::size_t>{1});
  REQUIRE(after.entries.size() == before.entries.size());
  for (std::size_t k = 0; k < before.entries.size(); ++k) {
    const std::size_t shifted = before.entries[k].index >= 1 ? before.entries[k].index + 1 : 0;
    CHECK(after.entries[k].index == shifted);
    CHECK(after.entries[k].score == doctest::Approx(before.entries[k].score));
  }
}

TEST_CASE("scaling every metric leaves the ranking unchanged") {
  std::vector<DesignMetrics> m;
  for (int k = 0; k < 8; ++k) {
    m.push_back(metrics(5.0 + 0.1 * k, 2.0 - 0.07 * (k % 3), 0.01 * (k % 4), 0.02 * (k % 5)));
  }
  auto scaled = [&](double s) {
    auto c = m;
    for (auto& d : c) {
      d.cms_m2 *= s;
      d.ua_m2 *= s;
      d.lc_volume_m3 *= s * s * s;
      d.fc_volume_m3 *= s * s * s;
    }
    return rank_designs(c);
  };
  const auto a = scaled(2.0), b = scaled(3.0);
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    CHECK(a.entries[k].index == b.entries[k].index);
    CHECK(a.entries[k].score == doctest::Approx(b.entries[k].score));
  }
}

TEST_CASE("all candidates rejected") {
  const std::vector<DesignMetrics> m{metrics(5.0, 2.0, 0, 0, false), metrics(4.0, 2.0, 0, 0, false)};
  const auto r = rank_designs(m);
  CHECK(r.all_rejected());
  CHECK(r.rejected.size() == 2);
}

TEST_CASE("shelter surface respects the anchors and the cap") {
  const ShelterOptions opt;
  for (auto kind : kAllAnchorKinds) {
    const auto anchors = AnchorConfig::make(kind, 2.0);
    const auto s = shelter_surface(anchors, 3, 17, opt);
    CHECK(s.max_height_m() <= opt.amplitude_cap_m);
    CHECK(s.control().z_mm.minCoeff() >= 0.0);
    for (const auto& a : anchors.points) CHECK(std::abs(s.height_at(a.x(), a.y())) < 1e-9);
  }
}

TEST_CASE("initial columns and roles") {
  const ShelterOptions opt;
  const auto one = AnchorConfig::make(AnchorKind::One, 2.0);
  const auto cols = initial_columns(shelter_surface(one, 0, 1, opt), one);
  CHECK(cols.size() == 16);
  CHECK(cols.load_bearing.size() == 3);
  for (const auto& c : cols.load_bearing) {
    CHECK((c.x_m > 1.0 || c.y_m > 1.0));
    CHECK(c.height_m > 0.0);
  }
  const auto four = AnchorConfig::make(AnchorKind::Four, 2.0);
  CHECK(initial_columns(shelter_surface(four, 0, 1, opt), four).load_bearing.empty());
}

TEST_CASE("reduction with zero tolerance removes nothing") {
  const auto design = make_candidate(0, AnchorConfig::make(AnchorKind::TwoSide, 2.0), 2, 9);
  const auto ref = supported_metrics(design.anchors, design.columns, 2.0);
  const std::vector<double> keys(design.columns.formwork.size(), 1.0);
  const auto r = reduce_formwork(design, ref, 0.0, 0.0, keys);
  CHECK(r.removed.empty());
  CHECK(r.columns.size() == design.columns.size());
}

TEST_CASE("reduction tries the smallest reaction first") {
  const auto design = make_candidate(0, AnchorConfig::make(AnchorKind::Three, 2.0), 1, 9);
  const std::size_t n = design.columns.formwork.size();
  REQUIRE(n > 3);
  std::vector<double> keys(n);
  for (std::size_t k = 0; k < n; ++k) keys[k] = 1.0 + static_cast<double>((k * 7) % n);
  keys[n / 2] = 0.0;
  const auto ref = supported_metrics(design.anchors, design.columns, 2.0);
  const auto r = reduce_formwork(design, ref, 1e9, 1e9, keys);
  REQUIRE_FALSE(r.removed.empty());
  CHECK(r.removed.front() == n / 2);
  for (std::size_t k = 1; k < r.removed.size(); ++k) {
    CHECK(std::abs(keys[r.removed[k - 1]]) <= std::abs(keys[r.removed[k]]));
  }
  CHECK(r.columns.load_bearing.size() == design.columns.load_bearing.size());
}

TEST_CASE("two percent tolerance removes columns and the result re-measures within it") {
  const auto design = make_candidate(0, AnchorConfig::make(AnchorKind::TwoDiagonal, 2.0), 4, 21);
  const auto ref = supported_metrics(design.anchors, design.columns, 2.0);
  const std::vector<double> keys(design.columns.formwork.size(), 1.0);
  const double dp = 0.02 * ref.perimeter_m, da = 0.02 * ref.area_m2;
  const auto r = reduce_formwork(design, ref, dp, da, keys);
  CHECK(r.columns.size() < 16);
  const auto again = supported_metrics(design.anchors, r.columns, 2.0);
  CHECK(std::abs(again.perimeter_m - ref.perimeter_m) <= dp);
  CHECK(std::abs(again.area_m2 - ref.area_m2) <= da);
  CHECK(again.area_m2 == doctest::Approx(r.final.area_m2));
}

TEST_CASE("flat shelters are all rejected and no winner is chosen") {
  ShelterOptions opt;
  opt.amplitude_cap_m = 1e-6;
  opt.iterations = 2;
  const auto report = optimize(opt, 3);
  CHECK(report.candidates.size() == 10);
  CHECK(report.ranking.all_rejected());
  CHECK_FALSE(report.winner);
  std::ostringstream csv;
  write_ranking_csv(csv, report);
  CHECK(csv.str().find(",false,,,,,,") != std::string::npos);
}

TEST_CASE("optimisation is identical across thread counts") {
  ThreadGuard guard;
  ShelterOptions opt;
  opt.iterations = 3;
  opt.fem_grid = 8;
  set_thread_count(1);
  const auto a = optimize(opt, 77);
  set_thread_count(4);
  const auto b = optimize(opt, 77);
  std::ostringstream ca, cb;
  write_ranking_csv(ca, a);
  write_ranking_csv(cb, b);
  CHECK(ca.str() == cb.str());
  REQUIRE(a.winner);
  REQUIRE(b.winner);
  CHECK(*a.winner == *b.winner);
  CHECK(a.reduction->removed == b.reduction->removed);
  CHECK(a.analysis->max_displacement_mm == b.analysis->max_displacement_mm);
}

}
