#include "chainshell/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "chainshell/error.hpp"
#include "chainshell/rng.hpp"

namespace chainshell {

std::string_view support_kind_name(SupportKind kind) {
  switch (kind) {
    case SupportKind::Fixed: return "fixed";
    case SupportKind::Pinned: return "pinned";
    case SupportKind::SlidingBase: return "sliding";
  }
  return "?";
}

SupportKind parse_support_kind(std::string_view text) {
  if (text == "fixed") return SupportKind::Fixed;
  if (text == "pinned") return SupportKind::Pinned;
  if (text == "sliding") return SupportKind::SlidingBase;
  throw ConfigError(fmt::format("unknown support kind '{}'", text));
}

namespace {

using Setter = std::function<void(PipelineConfig&, const std::string&)>;
using Getter = std::function<std::string(const PipelineConfig&)>;

struct Field {
  std::string key;  // "section.name"
  Setter set;
  Getter get;
};

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  }
  return v;
}

long long to_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <class T>
Field real(std::string key, T PipelineConfig::*block, double T::*member) {
  return {key,
          [key, block, member](PipelineConfig& c, const std::string& v) {
            c.*block.*member = to_double(key, v);
          },
          [block, member](const PipelineConfig& c) { return fmt::format("{}", c.*block.*member); }};
}

template <class T>
Field integer(std::string key, T PipelineConfig::*block, int T::*member) {
  return {key,
          [key, block, member](PipelineConfig& c, const std::string& v) {
            c.*block.*member = static_cast<int>(to_int(key, v));
          },
          [block, member](const PipelineConfig& c) { return fmt::format("{}", c.*block.*member); }};
}

template <class Enum>
Field choice(std::string key, std::function<Enum&(PipelineConfig&)> ref,
             std::vector<std::pair<std::string, Enum>> names) {
  return {key,
          [key, ref, names](PipelineConfig& c, const std::string& v) {
            for (const auto& [n, e] : names) {
              if (n == v) {
                ref(c) = e;
                return;
              }
            }
            throw ConfigError(fmt::format("{}: unknown value '{}'", key, v));
          },
          [ref, names](const PipelineConfig& c) {
            const Enum e = ref(const_cast<PipelineConfig&>(c));
            for (const auto& [n, v] : names) {
              if (v == e) return n;
            }
            return std::string("?");
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    using P = PipelineConfig;
    std::vector<Field> f;
    f.push_back({"run.seed",
                 [](P& c, const std::string& v) {
                   const auto n = to_int("run.seed", v);
                   if (n < 0) throw ConfigError("run.seed: must be non-negative");
                   c.seed = static_cast<std::uint64_t>(n);
                 },
                 [](const P& c) { return fmt::format("{}", c.seed); }});

    f.push_back(real("units.target_ratio", &P::units, &UnitsConfig::target_ratio));
    f.push_back(real("units.density_g_per_cm3", &P::units, &UnitsConfig::density_g_per_cm3));
    f.push_back(integer("units.grid_rows", &P::units, &UnitsConfig::grid_rows));
    f.push_back(integer("units.grid_cols", &P::units, &UnitsConfig::grid_cols));

    f.push_back(real("sweep2d.amplitude_step_mm", &P::sweep, &SweepOptions::amplitude_step_mm));
    f.push_back(real("sweep2d.amplitude_max_mm", &P::sweep, &SweepOptions::amplitude_max_mm));
    f.push_back(integer("sweep2d.frequency_min", &P::sweep, &SweepOptions::frequency_min));
    f.push_back(integer("sweep2d.frequency_max", &P::sweep, &SweepOptions::frequency_max));
    f.push_back(real("sweep2d.span_mm", &P::sweep, &SweepOptions::span_mm));
    f.push_back({"sweep2d.envelope_file", [](P& c, const std::string& v) { c.envelope_file = v; },
                 [](const P& c) { return c.envelope_file; }});

    f.push_back({"gen3d.shape",
                 [](P& c, const std::string& v) {
                   try {
                     c.gen3d.shape = parse_shape(v);
                   } catch (const Error& e) {
                     throw ConfigError(fmt::format("gen3d.shape: {}", e.what()));
                   }
                 },
                 [](const P& c) { return std::string(shape_short_name(c.gen3d.shape)); }});
    f.push_back({"gen3d.groups",
                 [](P& c, const std::string& v) {
                   c.gen3d.groups.clear();
                   for (const auto& g : split_list(v)) {
                     c.gen3d.groups.push_back(static_cast<int>(to_int("gen3d.groups", g)));
                   }
                 },
                 [](const P& c) { return fmt::format("{}", fmt::join(c.gen3d.groups, ",")); }});
    f.push_back(integer("gen3d.iterations", &P::gen3d, &Gen3dConfig::iterations));
    f.push_back(integer("gen3d.resolution", &P::gen3d, &Gen3dConfig::resolution));
    f.push_back(integer("gen3d.control_divisions", &P::gen3d, &Gen3dConfig::control_divisions));
    f.push_back(real("gen3d.offset_divisor", &P::gen3d, &Gen3dConfig::offset_divisor));
    f.push_back(real("gen3d.span_mm", &P::gen3d, &Gen3dConfig::span_mm));
    f.push_back(integer("gen3d.depth_resolution", &P::gen3d, &Gen3dConfig::depth_resolution));

    f.push_back(integer("filter.keep", &P::filter, &FilterConfig::keep));
    f.push_back(choice<ToleranceMode>(
        "filter.tolerance", [](P& c) -> ToleranceMode& { return c.filter.mode; },
        {{"auto", ToleranceMode::Auto}, {"fixed", ToleranceMode::Fixed}}));
    f.push_back(integer("filter.max_halvings", &P::filter, &FilterConfig::max_halvings));
    f.push_back(real("filter.delta_p_m", &P::filter, &FilterConfig::delta_p));
    f.push_back(real("filter.delta_a_m2", &P::filter, &FilterConfig::delta_a));

    const auto structure = [](std::string key, double StructureSpec::*m) {
      return Field{key,
                   [key, m](P& c, const std::string& v) { c.loads.structure.*m = to_double(key, v); },
                   [m](const P& c) { return fmt::format("{}", c.loads.structure.*m); }};
    };
    f.push_back(structure("loads.plan_area_m2", &StructureSpec::plan_area_m2));
    f.push_back(structure("loads.thickness_m", &StructureSpec::thickness_m));
    f.push_back(structure("loads.span_m", &StructureSpec::span_m));
    f.push_back(structure("loads.unit_weight_kN_per_m3", &StructureSpec::unit_weight_kN_per_m3));
    f.push_back(structure("loads.solid_fraction", &StructureSpec::solid_fraction));
    f.push_back(real("loads.snow_shape", &P::loads, &LoadsConfig::snow_shape));
    f.push_back(real("loads.wind_shape", &P::loads, &LoadsConfig::wind_shape));
    f.push_back(real("loads.precompression_N", &P::loads, &LoadsConfig::precompression_N));

    f.push_back({"fem.elastic_modulus_Pa",
                 [](P& c, const std::string& v) {
                   c.fem.material.elastic_modulus = to_double("fem.elastic_modulus_Pa", v);
                 },
                 [](const P& c) { return fmt::format("{}", c.fem.material.elastic_modulus); }});
    f.push_back({"fem.shear_modulus_Pa",
                 [](P& c, const std::string& v) {
                   c.fem.material.shear_modulus = to_double("fem.shear_modulus_Pa", v);
                 },
                 [](const P& c) { return fmt::format("{}", c.fem.material.shear_modulus); }});
    f.push_back(integer("fem.grid", &P::fem, &FemConfig::grid));
    f.push_back(choice<SupportPreset>(
        "fem.supports", [](P& c) -> SupportPreset& { return c.fem.supports; },
        {{"perimeter", SupportPreset::Perimeter}, {"corners", SupportPreset::Corners}}));
    f.push_back(choice<SupportKind>(
        "fem.support_kind", [](P& c) -> SupportKind& { return c.fem.support_kind; },
        {{"fixed", SupportKind::Fixed},
         {"pinned", SupportKind::Pinned},
         {"sliding", SupportKind::SlidingBase}}));

    const auto shelter_real = [](std::string key, double ShelterOptions::*m) {
      return Field{key, [key, m](P& c, const std::string& v) { c.optimizer.*m = to_double(key, v); },
                   [m](const P& c) { return fmt::format("{}", c.optimizer.*m); }};
    };
    const auto shelter_int = [](std::string key, int ShelterOptions::*m) {
      return Field{key,
                   [key, m](P& c, const std::string& v) {
                     c.optimizer.*m = static_cast<int>(to_int(key, v));
                   },
                   [m](const P& c) { return fmt::format("{}", c.optimizer.*m); }};
    };
    const auto weight = [](std::string key, double Weights::*m) {
      return Field{key,
                   [key, m](P& c, const std::string& v) { c.optimizer.weights.*m = to_double(key, v); },
                   [m](const P& c) { return fmt::format("{}", c.optimizer.weights.*m); }};
    };
    f.push_back({"optimizer.anchor_kinds",
                 [](P& c, const std::string& v) {
                   c.optimizer.anchor_kinds.clear();
                   for (const auto& k : split_list(v)) {
                     try {
                       c.optimizer.anchor_kinds.push_back(parse_anchor_kind(k));
                     } catch (const Error& e) {
                       throw ConfigError(fmt::format("optimizer.anchor_kinds: {}", e.what()));
                     }
                   }
                 },
                 [](const P& c) {
                   std::vector<std::string_view> names;
                   for (const auto k : c.optimizer.anchor_kinds) names.push_back(anchor_kind_name(k));
                   return fmt::format("{}", fmt::join(names, ","));
                 }});
    f.push_back(shelter_real("optimizer.span_m", &ShelterOptions::span_m));
    f.push_back(shelter_real("optimizer.amplitude_cap_m", &ShelterOptions::amplitude_cap_m));
    f.push_back(shelter_real("optimizer.clear_height_m", &ShelterOptions::clear_height_m));
    f.push_back(shelter_real("optimizer.column_side_m", &ShelterOptions::column_side_m));
    f.push_back(shelter_int("optimizer.control_divisions", &ShelterOptions::control_divisions));
    f.push_back(shelter_int("optimizer.resolution", &ShelterOptions::resolution));
    f.push_back(shelter_int("optimizer.iterations", &ShelterOptions::iterations));
    f.push_back(shelter_real("optimizer.min_amplitude_fraction",
                             &ShelterOptions::min_amplitude_fraction));
    f.push_back(shelter_real("optimizer.max_amplitude_fraction",
                             &ShelterOptions::max_amplitude_fraction));
    f.push_back(shelter_real("optimizer.crown_drop", &ShelterOptions::crown_drop));
    f.push_back(shelter_real("optimizer.anchor_radius_m", &ShelterOptions::anchor_radius_m));
    f.push_back(shelter_real("optimizer.offset_divisor", &ShelterOptions::offset_divisor));
    f.push_back(shelter_real("optimizer.slope_threshold", &ShelterOptions::slope_threshold));
    f.push_back(shelter_int("optimizer.slope_points", &ShelterOptions::slope_points));
    f.push_back(choice<DrainageRule>(
        "optimizer.drainage", [](P& c) -> DrainageRule& { return c.optimizer.drainage; },
        {{"ponding", DrainageRule::Ponding}, {"strict", DrainageRule::Strict}}));
    f.push_back(shelter_int("optimizer.usable_raster", &ShelterOptions::usable_raster));
    f.push_back(weight("optimizer.weight_cms", &Weights::cms));
    f.push_back(weight("optimizer.weight_ua", &Weights::ua));
    f.push_back(weight("optimizer.weight_lc", &Weights::lc));
    f.push_back(weight("optimizer.weight_fc", &Weights::fc));
    f.push_back(shelter_int("optimizer.fem_grid", &ShelterOptions::fem_grid));
    f.push_back(shelter_real("optimizer.reduction_tolerance", &ShelterOptions::reduction_tolerance));
    f.push_back(shelter_int("optimizer.fit_resolution", &ShelterOptions::fit_resolution));
    return f;
  }();
  return table;
}

template <class Fn>
void checked(const char* key, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(fmt::format("{}: {}", key, e.what()));
  }
}

}  // namespace

void PipelineConfig::validate() const {
  const auto need = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(fmt::format("{}: {}", key, what));
  };
  need(units.target_ratio > 0.0 && units.target_ratio < 1.0, "units.target_ratio",
       "must lie in (0, 1)");
  need(units.density_g_per_cm3 > 0.0, "units.density_g_per_cm3", "must be positive");
  need(units.grid_rows >= 0 && units.grid_cols >= 0, "units.grid_rows", "must be non-negative");
  need(sweep.amplitude_step_mm > 0.0, "sweep2d.amplitude_step_mm", "must be positive");
  need(sweep.amplitude_max_mm >= sweep.amplitude_step_mm, "sweep2d.amplitude_max_mm",
       "must be at least one step");
  need(sweep.frequency_min >= 3, "sweep2d.frequency_min", "must be >= 3");
  need(sweep.frequency_max >= sweep.frequency_min, "sweep2d.frequency_max",
       "must be >= frequency_min");
  need(sweep.span_mm > 0.0, "sweep2d.span_mm", "must be positive");
  need(!gen3d.groups.empty(), "gen3d.groups", "must list at least one group");
  for (const int g : gen3d.groups) need(g >= 1, "gen3d.groups", "groups start at 1");
  need(gen3d.iterations >= 1, "gen3d.iterations", "must be >= 1");
  need(gen3d.resolution >= 2, "gen3d.resolution", "must be >= 2");
  need(gen3d.control_divisions >= 0, "gen3d.control_divisions", "must be >= 0");
  need(gen3d.offset_divisor > 0.0, "gen3d.offset_divisor", "must be positive");
  need(gen3d.span_mm > 0.0, "gen3d.span_mm", "must be positive");
  need(gen3d.depth_resolution >= 1, "gen3d.depth_resolution", "must be >= 1");
  need(filter.keep >= 1, "filter.keep", "must be >= 1");
  need(filter.max_halvings >= 0, "filter.max_halvings", "must be non-negative");
  need(filter.delta_p >= 0.0, "filter.delta_p_m", "must be non-negative");
  need(filter.delta_a >= 0.0, "filter.delta_a_m2", "must be non-negative");
  checked("loads", [&] { loads.structure.validate(); });
  need(loads.snow_shape > 0.0 && loads.snow_shape <= 1.0, "loads.snow_shape", "must lie in (0, 1]");
  need(loads.wind_shape > 0.0, "loads.wind_shape", "must be positive");
  need(loads.precompression_N >= 0.0, "loads.precompression_N", "must be non-negative");
  need(fem.material.elastic_modulus > 0.0, "fem.elastic_modulus_Pa", "must be positive");
  need(fem.material.shear_modulus > 0.0, "fem.shear_modulus_Pa", "must be positive");
  need(fem.grid >= 2, "fem.grid", "must be >= 2");
  const auto& w = optimizer.weights;
  need(std::abs(w.cms + w.ua + w.lc + w.fc - 1.0) <= 1e-9, "optimizer.weight_*",
       "weights must sum to 1");
  checked("optimizer", [&] { optimizer.validate(); });
}

PipelineConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  PipelineConfig config;
  const auto& table = fields();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(fmt::format("{}: keys must sit inside a [section]", section));
    }
    for (const auto& [name, value] : body) {
      const std::string key = section + "." + name;
      const auto it = std::find_if(table.begin(), table.end(),
                                   [&](const Field& f) { return f.key == key; });
      if (it == table.end()) throw ConfigError(fmt::format("{}: unknown key", key));
      it->set(config, value.data());
    }
  }
  config.validate();
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  return parse_config(in);
}

std::string render_config(const PipelineConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    const auto dot = f.key.find('.');
    const std::string s = f.key.substr(0, dot);
    if (s != section) {
      out += fmt::format("{}[{}]\n", section.empty() ? "" : "\n", s);
      section = s;
    }
    out += fmt::format("{} = {}\n", f.key.substr(dot + 1), f.get(config));
  }
  return out;
}

std::uint64_t config_hash(const PipelineConfig& config) { return fnv1a(render_config(config)); }

SupportLayout parse_supports(std::istream& in, double span_m, int grid) {
  SupportLayout layout;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::string directive;
    if (!(words >> directive)) continue;
    const auto fail = [&](const char* what) {
      return ConfigError(fmt::format("supports line {}: {}", line_no, what));
    };
    std::string kind;
    if (directive == "corners" || directive == "perimeter") {
      if (!(words >> kind)) throw fail("missing support kind");
      const SupportKind k = parse_support_kind(kind);
      const auto extra = directive == "corners" ? SupportLayout::corners(span_m, k)
                                                : SupportLayout::perimeter(span_m, grid, k);
      layout.points.insert(layout.points.end(), extra.points.begin(), extra.points.end());
    } else if (directive == "point") {
      double x = 0.0, y = 0.0;
      if (!(words >> x >> y >> kind)) throw fail("expected 'point x y kind'");
      layout.points.push_back({x, y, parse_support_kind(kind)});
    } else if (directive == "column") {
      double x = 0.0, y = 0.0, side = 0.0;
      std::string role;
      if (!(words >> x >> y >> side >> role)) throw fail("expected 'column x y side role'");
      if (!(side > 0.0)) throw fail("column side must be positive");
      if (role != "load_bearing" && role != "formwork") throw fail("unknown column role");
      layout.columns.push_back(
          {x, y, side, role == "load_bearing" ? ColumnRole::LoadBearing : ColumnRole::Formwork});
    } else {
      throw fail("unknown directive");
    }
  }
  return layout;
}

SupportLayout load_supports(const std::filesystem::path& path, double span_m, int grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open supports file '{}'", path.string()));
  return parse_supports(in, span_m, grid);
}

SupportLayout default_supports(const FemConfig& fem, double span_m) {
  return fem.supports == SupportPreset::Corners
             ? SupportLayout::corners(span_m, fem.support_kind)
             : SupportLayout::perimeter(span_m, fem.grid, fem.support_kind);
}

}  // namespace chainshell
