#include "chainshell/loads.hpp"

#include <fmt/format.h>

#include "chainshell/error.hpp"

namespace chainshell {

void StructureSpec::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ParameterError(fmt::format("{} must be positive, got {}", name, v));
  };
  positive(plan_area_m2, "plan area");
  positive(thickness_m, "thickness");
  positive(span_m, "span");
  positive(unit_weight_kN_per_m3, "unit weight");
  positive(solid_fraction, "solid fraction");
}

double live_load(const StructureSpec& spec) {
  spec.validate();
  return kLiveLoadPerArea * spec.plan_area_m2;
}

double snow_load(const StructureSpec& spec, double mu) {
  spec.validate();
  if (!(mu > 0.0 && mu <= 1.0)) {
    throw ParameterError(fmt::format("snow shape factor {} outside (0, 1]", mu));
  }
  return mu * kSnowLoadPerArea * spec.plan_area_m2;
}

double wind_load(const StructureSpec& spec, double cp) {
  spec.validate();
  if (!(cp > 0.0)) throw ParameterError(fmt::format("wind shape factor {} must be positive", cp));
  return cp * kWindLoadPerArea * spec.plan_area_m2;
}

double dead_load(const StructureSpec& spec, double surface_area_m2, double calibration) {
  spec.validate();
  if (surface_area_m2 < spec.plan_area_m2 * (1.0 - 1e-9)) {
    throw ParameterError(fmt::format("surface area {} m^2 below plan area {} m^2", surface_area_m2,
                                     spec.plan_area_m2));
  }
  return spec.unit_weight_kN_per_m3 * spec.solid_fraction * surface_area_m2 * spec.thickness_m *
         calibration;
}

LoadCase load_case(const StructureSpec& spec, double surface_area_m2, double mu, double cp) {
  LoadCase lc;
  lc.dead_kN = dead_load(spec, surface_area_m2);
  lc.live_kN = live_load(spec);
  lc.snow_kN = snow_load(spec, mu);
  lc.wind_kN = wind_load(spec, cp);
  lc.total_kN = lc.dead_kN + lc.live_kN + lc.snow_kN + lc.wind_kN;
  return lc;
}

double deflection_limit_mm(double span_m) {
  if (!(span_m > 0.0)) throw ParameterError("span must be positive");
  return span_m * 1000.0 / 250.0;
}

}  // namespace chainshell
