#pragma once

namespace chainshell {

/// Service loads on the shell, kilonewtons.
struct LoadCase {
  double dead_kN = 0.0;
  double live_kN = 0.0;
  double snow_kN = 0.0;
  double wind_kN = 0.0;
  double total_kN = 0.0;  ///< dead + live + snow + wind, no re-rounding
};

struct StructureSpec {
  double plan_area_m2 = 4.0;
  double thickness_m = 0.08;
  double span_m = 2.0;
  double unit_weight_kN_per_m3 = 1.13;
  double solid_fraction = 0.08;

  /// Throws ParameterError unless every field is positive.
  void validate() const;
};

inline constexpr double kLiveLoadPerArea = 0.4;   // kN/m^2
inline constexpr double kSnowLoadPerArea = 0.9;   // kN/m^2
inline constexpr double kWindLoadPerArea = 1.07;  // kN/m^2
inline constexpr double kDefaultSnowShape = 0.8;
inline constexpr double kDefaultWindShape = 0.75;

/// Dead-load calibration factor: the volume model rho * solid_fraction * area * t
/// scaled so the flat 2 m x 2 m default shell weighs 0.10 kN.
inline constexpr double kDeadLoadCalibration = 0.10 / (1.13 * 0.08 * 4.0 * 0.08);

double live_load(const StructureSpec& spec);
/// Throws ParameterError unless 0 < mu <= 1.
double snow_load(const StructureSpec& spec, double mu = kDefaultSnowShape);
/// Throws ParameterError unless cp > 0.
double wind_load(const StructureSpec& spec, double cp = kDefaultWindShape);
/// Throws ParameterError when surface_area is below the plan area.
double dead_load(const StructureSpec& spec, double surface_area_m2,
                 double calibration = kDeadLoadCalibration);

LoadCase load_case(const StructureSpec& spec, double surface_area_m2,
                   double mu = kDefaultSnowShape, double cp = kDefaultWindShape);

/// span / 250, returned in millimetres.
double deflection_limit_mm(double span_m);

}  // namespace chainshell
