#include "chainshell/profile2d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "chainshell/error.hpp"

namespace chainshell {

namespace {

double wavenumber(const SectionProfile& p) {
  return 2.0 * std::numbers::pi * p.frequency / p.span_mm;
}

void check_x(double x_mm, const SectionProfile& p) {
  if (!(x_mm >= 0.0 && x_mm <= p.span_mm)) {
    throw ParameterError(fmt::format("x = {} mm outside the span [0, {}]", x_mm, p.span_mm));
  }
}

}  // namespace

void SectionProfile::validate() const {
  if (!(span_mm > 0.0)) throw ParameterError("span must be positive");
  if (frequency < 3) throw ParameterError(fmt::format("frequency {} below 3", frequency));
  if (!(amplitude_mm >= 0.0)) throw ParameterError("amplitude must be non-negative");
}

double profile_height(double x_mm, const SectionProfile& p) {
  p.validate();
  check_x(x_mm, p);
  return p.amplitude_mm * std::sin(wavenumber(p) * x_mm);
}

double profile_curvature(double x_mm, const SectionProfile& p) {
  p.validate();
  check_x(x_mm, p);
  const double k = wavenumber(p);
  const double dy = p.amplitude_mm * k * std::cos(k * x_mm);
  const double ddy = -p.amplitude_mm * k * k * std::sin(k * x_mm);
  return std::abs(ddy) / std::pow(1.0 + dy * dy, 1.5);
}

double peak_curvature(const SectionProfile& p) {
  const double k = wavenumber(p);
  return p.amplitude_mm * k * k;
}

double FeasibilityEnvelope::max_amplitude(int frequency) const {
  const auto it = max_amplitude_mm.find(frequency);
  if (it == max_amplitude_mm.end()) {
    throw EnvelopeError(fmt::format("{} envelope has no entry for f = {}", shape_name(shape),
                                    frequency));
  }
  return it->second;
}

bool FeasibilityEnvelope::feasible(double amplitude_mm, int frequency) const {
  return amplitude_mm <= max_amplitude(frequency);
}

EnvelopeSet parse_envelopes(std::istream& in) {
  EnvelopeSet set;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string shape;
    if (!(fields >> shape)) continue;
    double f = 0.0;
    double max_a = 0.0;
    if (!(fields >> f >> max_a)) {
      throw ConfigError(fmt::format("envelope line {}: expected 'shape f max_A_mm'", line_no));
    }
    if (f != std::floor(f)) {
      throw ConfigError(fmt::format("envelope line {}: frequency {} is not an integer", line_no, f));
    }
    if (max_a < 0.0) {
      throw ConfigError(fmt::format("envelope line {}: negative max amplitude", line_no));
    }
    UnitShape parsed;
    try {
      parsed = parse_shape(shape);
    } catch (const ParameterError& e) {
      throw ConfigError(fmt::format("envelope line {}: {}", line_no, e.what()));
    }
    auto& env = set[parsed];
    env.shape = parsed;
    env.max_amplitude_mm[static_cast<int>(f)] = max_a;
  }
  return set;
}

EnvelopeSet load_envelopes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open envelope file '{}'", path));
  return parse_envelopes(in);
}

void write_envelopes(std::ostream& out, const EnvelopeSet& set) {
  out << "# shape f max_A_mm\n";
  for (const auto& [shape, env] : set) {
    for (const auto& [f, a] : env.max_amplitude_mm) {
      fmt::print(out, "{} {} {}\n", shape_short_name(shape), f, a);
    }
  }
}

const EnvelopeSet& default_envelopes() {
  static const EnvelopeSet set = [] {
    std::istringstream table(
        "tri  3 15\ntri  4 15\ntri  5 20\ntri  6 20\ntri  7 15\ntri  8 15\ntri  9 10\ntri 10 10\n"
        "circ 3 20\ncirc 4 20\ncirc 5 25\ncirc 6 25\ncirc 7 25\ncirc 8 20\ncirc 9 20\ncirc 10 15\n"
        "rect 3 25\nrect 4 25\nrect 5 30\nrect 6 30\nrect 7 35\nrect 8 35\nrect 9 35\nrect 10 30\n");
    return parse_envelopes(table);
  }();
  return set;
}

SweepReport sweep_2d(UnitShape shape, const FeasibilityEnvelope& envelope,
                     const SweepOptions& options) {
  if (!(options.amplitude_step_mm > 0.0) || options.amplitude_max_mm < 0.0) {
    throw ParameterError("sweep amplitude step must be positive");
  }
  if (options.frequency_min < 3 || options.frequency_max < options.frequency_min) {
    throw ParameterError("sweep frequency range must start at 3 or above and be non-empty");
  }
  for (int f = options.frequency_min; f <= options.frequency_max; ++f) {
    (void)envelope.max_amplitude(f);
  }

  SweepReport report;
  report.shape = shape;
  report.amplitude_rows =
      static_cast<int>(std::floor(options.amplitude_max_mm / options.amplitude_step_mm + 1e-9)) + 1;
  report.frequency_cols = options.frequency_max - options.frequency_min + 1;
  const int total = report.amplitude_rows * report.frequency_cols;
  report.cells.resize(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(static)
  for (int idx = 0; idx < total; ++idx) {
    const int row = idx / report.frequency_cols;
    const int col = idx % report.frequency_cols;
    SectionProfile p;
    p.amplitude_mm = row * options.amplitude_step_mm;
    p.frequency = options.frequency_min + col;
    p.span_mm = options.span_mm;
    SweepCell& cell = report.cells[static_cast<std::size_t>(idx)];
    cell.amplitude_mm = p.amplitude_mm;
    cell.frequency = p.frequency;
    cell.feasible = p.amplitude_mm <= envelope.max_amplitude_mm.at(p.frequency);
    cell.peak_curvature_per_mm = peak_curvature(p);
  }

  for (const auto& cell : report.cells) {
    if (!cell.feasible) continue;
    const AmplitudeFrequency af{cell.amplitude_mm, cell.frequency};
    if (!report.maximal || af.amplitude_mm > report.maximal->amplitude_mm ||
        (af.amplitude_mm == report.maximal->amplitude_mm &&
         af.frequency > report.maximal->frequency)) {
      report.maximal = af;
    }
  }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report, bool header) {
  if (header) out << "shape,A_mm,f,feasible,peak_curvature_per_mm\n";
  for (const auto& cell : report.cells) {
    fmt::print(out, "{},{:g},{},{},{:.9e}\n", shape_short_name(report.shape), cell.amplitude_mm,
               cell.frequency, cell.feasible ? 1 : 0, cell.peak_curvature_per_mm);
  }
}

}  // namespace chainshell
