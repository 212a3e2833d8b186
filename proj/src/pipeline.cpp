#include "chainshell/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "chainshell/fem.hpp"
#include "chainshell/loads.hpp"
#include "chainshell/rng.hpp"
#include "chainshell/units.hpp"

namespace fs = std::filesystem;

namespace chainshell {

namespace {

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Rows of a headed CSV as name -> value maps.
std::vector<std::map<std::string, std::string>> read_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  const auto header = split_csv(line);
  std::vector<std::map<std::string, std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ConfigError(fmt::format("CSV line {}: expected {} fields, got {}", line_no,
                                    header.size(), cells.size()));
    }
    std::map<std::string, std::string> row;
    for (std::size_t k = 0; k < header.size(); ++k) row[header[k]] = cells[k];
    rows.push_back(std::move(row));
  }
  return rows;
}

const std::string& field(const std::map<std::string, std::string>& row, const std::string& key) {
  const auto it = row.find(key);
  if (it == row.end()) throw ConfigError(fmt::format("CSV column '{}' missing", key));
  return it->second;
}

double as_double(const std::map<std::string, std::string>& row, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field(row, key), &used);
    if (used != field(row, key).size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("CSV column '{}': bad number '{}'", key, field(row, key)));
  }
}

long long as_int(const std::map<std::string, std::string>& row, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(field(row, key), &used);
    if (used != field(row, key).size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("CSV column '{}': bad integer '{}'", key, field(row, key)));
  }
}

std::uint64_t as_seed(const std::map<std::string, std::string>& row, const std::string& key) {
  try {
    return std::stoull(field(row, key));
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("CSV column '{}': bad seed '{}'", key, field(row, key)));
  }
}

GenerationSpec generation_spec(const SurfaceRecord& r, const PipelineConfig& config,
                               int iterations) {
  GenerationSpec spec;
  spec.amplitude_mm = r.amplitude_mm;
  spec.frequency = r.frequency;
  spec.iterations = iterations;
  spec.seed = r.seed;
  spec.span_mm = config.gen3d.span_mm;
  spec.control_divisions = r.control_divisions;
  spec.offset_divisor = config.gen3d.offset_divisor;
  return spec;
}

}  // namespace

std::uint64_t group_seed(std::uint64_t seed, int group) {
  return derive_seed(seed, fmt::format("gen3d/group{}", group));
}

const FeasibilityEnvelope& gen3d_envelope(const PipelineConfig& config) {
  static thread_local EnvelopeSet loaded;
  static thread_local std::string loaded_from;
  const EnvelopeSet* set = &default_envelopes();
  if (!config.envelope_file.empty()) {
    if (loaded_from != config.envelope_file) {
      loaded = load_envelopes(config.envelope_file);
      loaded_from = config.envelope_file;
    }
    set = &loaded;
  }
  const auto it = set->find(config.gen3d.shape);
  if (it == set->end()) {
    throw EnvelopeError(fmt::format("no envelope for {}", shape_name(config.gen3d.shape)));
  }
  return it->second;
}

ShellSurface regenerate(const SurfaceRecord& record, const PipelineConfig& config) {
  if (record.iteration < 0) throw ParameterError("iteration must be non-negative");
  auto grids = generate_iterations(generation_spec(record, config, record.iteration + 1),
                                   gen3d_envelope(config));
  return ShellSurface(std::move(grids.back()), config.gen3d.resolution);
}

void stage_units(const PipelineConfig& config, const fs::path& dir) {
  auto out = open_out(dir / "units.csv");
  out << "shape,member_length_mm,rod_diameter_mm,pitch_mm,solid_to_gap_ratio,"
         "centreline_length_mm,moment_of_inertia,sheet_weight_g\n";
  for (const auto shape : {UnitShape::Triangular, UnitShape::Circular, UnitShape::Rectangular}) {
    UnitCell cell = reference_cell(shape);
    cell.pitch_mm = calibrate_pitch(cell, config.units.target_ratio);
    SheetSpec sheet;
    sheet.unit = cell;
    sheet.grid_rows = config.units.grid_rows;
    sheet.grid_cols = config.units.grid_cols;
    sheet.density_g_per_cm3 = config.units.density_g_per_cm3;
    fmt::print(out, "{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n",
               shape_short_name(shape), cell.member_length_mm, cell.rod_diameter_mm,
               *cell.pitch_mm, solid_to_gap_ratio(cell), centreline_length(cell),
               moment_of_inertia(cell), sheet_weight(sheet));
  }
}

void stage_sweep2d(const PipelineConfig& config, const fs::path& dir) {
  const EnvelopeSet envelopes =
      config.envelope_file.empty() ? default_envelopes() : load_envelopes(config.envelope_file);
  auto cells = open_out(dir / "sweep2d.csv");
  auto maxima = open_out(dir / "sweep_maxima.csv");
  maxima << "shape,max_A_mm,f\n";
  bool header = true;
  for (const auto& [shape, envelope] : envelopes) {
    const SweepReport report = sweep_2d(shape, envelope, config.sweep);
    write_sweep_csv(cells, report, header);
    header = false;
    if (report.maximal) {
      fmt::print(maxima, "{},{:g},{}\n", shape_short_name(shape), report.maximal->amplitude_mm,
                 report.maximal->frequency);
    } else {
      fmt::print(maxima, "{},,\n", shape_short_name(shape));
    }
  }
}

std::vector<SurfaceRecord> stage_gen3d(const PipelineConfig& config, std::uint64_t seed,
                                       const fs::path& dir) {
  const auto& envelope = gen3d_envelope(config);
  std::vector<SurfaceRecord> rows;
  for (const int g : config.gen3d.groups) {
    const GroupParams params = group_params(g);
    SurfaceRecord base;
    base.group = g;
    base.seed = group_seed(seed, g);
    base.amplitude_mm = params.amplitude_mm;
    base.frequency = params.frequency;
    base.control_divisions = config.gen3d.control_divisions > 0
                                 ? config.gen3d.control_divisions
                                 : default_control_divisions(params.frequency);
    const auto grids =
        generate_iterations(generation_spec(base, config, config.gen3d.iterations), envelope);

    std::vector<SurfaceRecord> group_rows(grids.size(), base);
    std::vector<std::optional<ShellSurface>> surfaces(grids.size());
#pragma omp parallel for schedule(static)
    for (int it = 0; it < static_cast<int>(grids.size()); ++it) {
      const auto k = static_cast<std::size_t>(it);
      surfaces[k].emplace(grids[k], config.gen3d.resolution);
      auto& r = group_rows[k];
      r.iteration = it;
      r.min_z_m = surfaces[k]->min_height_m();
      r.max_z_m = surfaces[k]->max_height_m();
      r.metrics = measure(*surfaces[k]);
    }
    const fs::path gdir = dir / fmt::format("group{}", g);
    for (std::size_t k = 0; k < grids.size(); ++k) {
      auto mesh = open_out(gdir / fmt::format("iter{:02}.obj", k));
      write_mesh(mesh, surfaces[k]->mesh());
      auto pgm = open_out(gdir / fmt::format("iter{:02}.pgm", k));
      write_pgm(pgm, depth_map(*surfaces[k], config.gen3d.depth_resolution));
      rows.push_back(group_rows[k]);
    }
  }
  auto manifest = open_out(dir / "manifest.csv");
  write_surface_csv(manifest, rows);
  return rows;
}

std::vector<SurfaceRecord> stage_filter(const PipelineConfig& config,
                                        const std::vector<SurfaceRecord>& pool,
                                        const fs::path& dir) {
  std::map<int, std::vector<SurfaceRecord>> groups;
  for (const auto& r : pool) groups[r.group].push_back(r);
  std::vector<SurfaceRecord> selected;
  auto notes = open_out(dir / "filter_summary.csv");
  notes << "group,pool,kept,delta_p_m,delta_a_m2,halvings,short_of_target\n";
  const auto keep = static_cast<std::size_t>(config.filter.keep);
  for (auto& [g, rows] : groups) {
    std::sort(rows.begin(), rows.end(),
              [](const SurfaceRecord& a, const SurfaceRecord& b) { return a.iteration < b.iteration; });
    std::vector<SurfaceMetrics> metrics;
    for (const auto& r : rows) metrics.push_back(r.metrics);
    AutoSelection sel;
    if (config.filter.mode == ToleranceMode::Auto) {
      sel = auto_tolerance(metrics, keep, config.filter.max_halvings);
    } else {
      sel.tolerance = {config.filter.delta_p, config.filter.delta_a};
      sel.kept = select_distinct(metrics, sel.tolerance.delta_p, sel.tolerance.delta_a, keep);
      sel.short_of_target = sel.kept.size() < keep;
    }
    for (const auto k : sel.kept) {
      SurfaceRecord r = rows[k];
      r.delta_p_m = sel.tolerance.delta_p;
      r.delta_a_m2 = sel.tolerance.delta_a;
      selected.push_back(r);
    }
    fmt::print(notes, "{},{},{},{:.9f},{:.9f},{},{}\n", g, rows.size(), sel.kept.size(),
               sel.tolerance.delta_p, sel.tolerance.delta_a, sel.halvings,
               sel.short_of_target ? "true" : "false");
  }
  auto out = open_out(dir / "selected.csv");
  write_surface_csv(out, selected);
  return selected;
}

std::vector<AnalysisRecord> stage_analyze(const PipelineConfig& config,
                                          const std::vector<SurfaceRecord>& selected,
                                          const SupportLayout& supports, const fs::path& dir) {
  AnalysisOptions options;
  options.grid = config.fem.grid;
  options.material = config.fem.material;
  options.section = {config.loads.structure.thickness_m, config.loads.structure.solid_fraction};
  options.span_m = config.loads.structure.span_m;

  std::vector<AnalysisRecord> rows(selected.size());
  std::vector<std::string> failures(selected.size());
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < static_cast<int>(selected.size()); ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      const ShellSurface surface = regenerate(selected[i], config);
      auto& r = rows[i];
      r.model_id = k + 1;
      r.surface = selected[i];
      r.load = load_case(config.loads.structure, selected[i].metrics.area_m2,
                         config.loads.snow_shape, config.loads.wind_shape);
      const ShellAnalysis a =
          analyze_shell(surface, supports, r.load, config.loads.precompression_N, options);
      r.max_displacement_mm = a.max_displacement_mm;
      r.limit_mm = a.limit_mm;
      r.pass = a.pass;
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      throw Error(fmt::format("model {} (group {}, iteration {}): {}", i + 1, selected[i].group,
                              selected[i].iteration, failures[i]));
    }
  }
  auto out = open_out(dir / "displacements.csv");
  write_displacements_csv(out, rows);
  return rows;
}

OptimizationReport stage_optimize(const PipelineConfig& config, std::uint64_t seed,
                                  const fs::path& dir) {
  OptimizationReport report = optimize(config.optimizer, seed);
  {
    auto out = open_out(dir / "ranking.csv");
    write_ranking_csv(out, report);
  }
  {
    auto out = open_out(dir / "failing_slope_points.csv");
    out << "candidate_id,anchor_kind,x_m,y_m\n";
    for (const auto& c : report.candidates) {
      for (const auto& p : c.slope.failing_points) {
        fmt::print(out, "{},{},{:.6f},{:.6f}\n", c.id, anchor_kind_name(c.anchors.kind), p.x(),
                   p.y());
      }
    }
  }
  auto summary = open_out(dir / "optimize_summary.csv");
  summary << "key,value\n";
  if (!report.winner) {
    summary << "status,all_rejected\n";
    return report;
  }
  const auto& w = report.candidates[*report.winner];
  {
    auto out = open_out(dir / "winner.obj");
    write_mesh(out, w.surface.mesh());
  }
  {
    auto out = open_out(dir / "winner_columns.csv");
    out << "role,x_m,y_m,height_m,volume_m3,status,reaction_kN\n";
    for (const auto& c : w.columns.load_bearing) {
      fmt::print(out, "load_bearing,{:.6f},{:.6f},{:.6f},{:.9f},kept,\n", c.x_m, c.y_m, c.height_m,
                 c.volume_m3());
    }
    const auto& removed = report.reduction->removed;
    for (std::size_t k = 0; k < w.columns.formwork.size(); ++k) {
      const auto& c = w.columns.formwork[k];
      const bool gone = std::find(removed.begin(), removed.end(), k) != removed.end();
      fmt::print(out, "formwork,{:.6f},{:.6f},{:.6f},{:.9f},{},{:.6f}\n", c.x_m, c.y_m, c.height_m,
                 c.volume_m3(), gone ? "removed" : "kept", report.reactions_kN[k]);
    }
  }
  const auto& a = *report.analysis;
  {
    auto out = open_out(dir / "winner_displacements.csv");
    out << "node,x_m,y_m,z_m,ux_mm,uy_mm,uz_mm,u_mm\n";
    for (std::size_t n = 0; n < a.model.nodes.size(); ++n) {
      const auto& p = a.model.nodes[n];
      const auto& u = a.result.displacements[n];
      fmt::print(out, "{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", n, p.x(), p.y(),
                 p.z(), u(0) * 1e3, u(1) * 1e3, u(2) * 1e3, u.head<3>().norm() * 1e3);
    }
  }
  const auto& red = *report.reduction;
  fmt::print(summary, "status,ok\n");
  fmt::print(summary, "winner_id,{}\n", w.id);
  fmt::print(summary, "anchor_kind,{}\n", anchor_kind_name(w.anchors.kind));
  fmt::print(summary, "weighted_score,{:.6f}\n", report.ranking.entries.front().score);
  fmt::print(summary, "ranked,{}\n", report.ranking.entries.size());
  fmt::print(summary, "rejected,{}\n", report.ranking.rejected.size());
  fmt::print(summary, "formwork_initial,{}\n", w.columns.formwork.size());
  fmt::print(summary, "formwork_removed,{}\n", red.removed.size());
  fmt::print(summary, "reference_perimeter_m,{:.6f}\n", red.reference.perimeter_m);
  fmt::print(summary, "reference_area_m2,{:.6f}\n", red.reference.area_m2);
  fmt::print(summary, "reduced_perimeter_m,{:.6f}\n", red.final.perimeter_m);
  fmt::print(summary, "reduced_area_m2,{:.6f}\n", red.final.area_m2);
  fmt::print(summary, "max_displacement_mm,{:.6f}\n", a.max_displacement_mm);
  fmt::print(summary, "limit_mm,{:.6f}\n", a.limit_mm);
  fmt::print(summary, "pass,{}\n", a.pass ? "true" : "false");
  return report;
}

void write_surface_csv(std::ostream& out, const std::vector<SurfaceRecord>& rows) {
  out << "group,iteration,seed,A_mm,f,control_divisions,min_z_m,max_z_m,perimeter_m,area_m2,"
         "delta_p_m,delta_a_m2\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{:g},{},{},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f},{:.9f}\n", r.group,
               r.iteration, r.seed, r.amplitude_mm, r.frequency, r.control_divisions, r.min_z_m,
               r.max_z_m, r.metrics.perimeter_m, r.metrics.area_m2, r.delta_p_m, r.delta_a_m2);
  }
}

std::vector<SurfaceRecord> read_surface_csv(std::istream& in) {
  std::vector<SurfaceRecord> rows;
  for (const auto& row : read_table(in)) {
    SurfaceRecord r;
    r.group = static_cast<int>(as_int(row, "group"));
    r.iteration = static_cast<int>(as_int(row, "iteration"));
    r.seed = as_seed(row, "seed");
    r.amplitude_mm = as_double(row, "A_mm");
    r.frequency = static_cast<int>(as_int(row, "f"));
    r.control_divisions = static_cast<int>(as_int(row, "control_divisions"));
    r.min_z_m = as_double(row, "min_z_m");
    r.max_z_m = as_double(row, "max_z_m");
    r.metrics = {as_double(row, "perimeter_m"), as_double(row, "area_m2")};
    r.delta_p_m = as_double(row, "delta_p_m");
    r.delta_a_m2 = as_double(row, "delta_a_m2");
    rows.push_back(r);
  }
  return rows;
}

std::vector<SurfaceRecord> read_surface_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  return read_surface_csv(in);
}

void write_displacements_csv(std::ostream& out, const std::vector<AnalysisRecord>& rows) {
  out << "model_id,group,iteration,area_m2,DL_kN,LL_kN,SL_kN,WL_kN,TL_kN,max_displacement_mm,"
         "limit_mm,pass\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n",
               r.model_id, r.surface.group, r.surface.iteration, r.surface.metrics.area_m2,
               r.load.dead_kN, r.load.live_kN, r.load.snow_kN, r.load.wind_kN, r.load.total_kN,
               r.max_displacement_mm, r.limit_mm, r.pass ? "pass" : "fail");
  }
}

void run_pipeline(const PipelineConfig& config, const fs::path& out) {
  config.validate();
  fs::create_directories(out);
  {
    auto cfg = open_out(out / "config.ini");
    cfg << render_config(config);
  }
  struct Timing {
    std::string stage;
    double seconds;
  };
  std::vector<Timing> timings;
  std::string failed, cause;

  const auto write_manifest = [&] {
    auto m = open_out(out / "manifest");
    fmt::print(m, "config_hash = {:016x}\n", config_hash(config));
    fmt::print(m, "seed = {}\n", config.seed);
    for (const auto& t : timings) fmt::print(m, "stage.{}.seconds = {:.3f}\n", t.stage, t.seconds);
    fmt::print(m, "status = {}\n", failed.empty() ? "complete" : "incomplete");
    if (!failed.empty()) {
      fmt::print(m, "failed_stage = {}\n", failed);
      fmt::print(m, "error = {}\n", cause);
    }
  };

  std::vector<SurfaceRecord> pool, selected;
  const auto stage = [&](const std::string& name, auto&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(out / name);
    } catch (const std::exception& e) {
      failed = name;
      cause = e.what();
      write_manifest();
      throw StageError(name, e.what());
    }
    timings.push_back(
        {name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  };

  stage("units", [&](const fs::path& d) { stage_units(config, d); });
  stage("sweep2d", [&](const fs::path& d) { stage_sweep2d(config, d); });
  stage("gen3d", [&](const fs::path& d) { pool = stage_gen3d(config, config.seed, d); });
  stage("filter", [&](const fs::path& d) { selected = stage_filter(config, pool, d); });
  stage("analyze", [&](const fs::path& d) {
    stage_analyze(config, selected, default_supports(config.fem, config.loads.structure.span_m), d);
  });
  stage("optimize", [&](const fs::path& d) {
    stage_optimize(config, derive_seed(config.seed, "optimize"), d);
  });
  write_manifest();
}

void write_report(std::ostream& out, const fs::path& run_dir) {
  const auto find = [&](const std::string& name) -> std::optional<fs::path> {
    for (const auto& p : {run_dir / name, run_dir / "units" / name, run_dir / "sweep2d" / name,
                          run_dir / "filter" / name, run_dir / "analyze" / name,
                          run_dir / "optimize" / name}) {
      if (fs::exists(p)) return p;
    }
    return std::nullopt;
  };
  const auto table = [&](const std::string& name) {
    std::vector<std::map<std::string, std::string>> rows;
    if (const auto p = find(name)) {
      std::ifstream in(*p);
      rows = read_table(in);
    }
    return rows;
  };

  if (fs::exists(run_dir / "manifest")) {
    std::ifstream in(run_dir / "manifest");
    out << "Run manifest\n";
    for (std::string line; std::getline(in, line);) out << "  " << line << "\n";
    out << "\n";
  }
  if (const auto rows = table("units.csv"); !rows.empty()) {
    out << "Unit cells\n";
    fmt::print(out, "  {:<6} {:>10} {:>8} {:>14} {:>12}\n", "shape", "pitch_mm", "R_sg", "inertia",
               "weight_g");
    for (const auto& r : rows) {
      fmt::print(out, "  {:<6} {:>10.4f} {:>8.4f} {:>14.4f} {:>12.4f}\n", field(r, "shape"),
                 as_double(r, "pitch_mm"), as_double(r, "solid_to_gap_ratio"),
                 as_double(r, "moment_of_inertia"), as_double(r, "sheet_weight_g"));
    }
    out << "\n";
  }
  if (const auto rows = table("sweep_maxima.csv"); !rows.empty()) {
    out << "2D sweep maxima\n";
    for (const auto& r : rows) {
      fmt::print(out, "  {:<6} A = {} mm, f = {}\n", field(r, "shape"), field(r, "max_A_mm"),
                 field(r, "f"));
    }
    out << "\n";
  }
  if (const auto rows = table("displacements.csv"); !rows.empty()) {
    out << "Load analysis\n";
    std::map<long long, std::pair<double, int>> means;
    for (const auto& r : rows) {
      fmt::print(out, "  model {:>2} group {} iter {:>2}  TL {:.4f} kN  max {:.3f} mm  {}\n",
                 field(r, "model_id"), field(r, "group"), field(r, "iteration"),
                 as_double(r, "TL_kN"), as_double(r, "max_displacement_mm"), field(r, "pass"));
      auto& m = means[as_int(r, "group")];
      m.first += as_double(r, "max_displacement_mm");
      ++m.second;
    }
    for (const auto& [g, m] : means) {
      fmt::print(out, "  group {} mean {:.3f} mm over {} models\n", g, m.first / m.second, m.second);
    }
    out << "\n";
  }
  if (const auto rows = table("optimize_summary.csv"); !rows.empty()) {
    out << "Shelter optimisation\n";
    for (const auto& r : rows) fmt::print(out, "  {} = {}\n", field(r, "key"), field(r, "value"));
    out << "\n";
  }
  if (const auto rows = table("ranking.csv"); !rows.empty()) {
    out << "Top ranked shelters\n";
    int shown = 0;
    for (const auto& r : rows) {
      if (field(r, "rank").empty() || ++shown > 5) break;
      fmt::print(out, "  #{} candidate {} ({}) score {}  CMS {} UA {}\n", field(r, "rank"),
                 field(r, "candidate_id"), field(r, "anchor_kind"), field(r, "weighted_score"),
                 field(r, "CMS_m2"), field(r, "UA_m2"));
    }
  }
}

}  // namespace chainshell
