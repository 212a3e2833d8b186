#pragma once

#include <vector>

#include <Eigen/Dense>

namespace chainshell {

/// Interpolating cubic spline on uniformly spaced knots over [0, span],
/// not-a-knot end conditions. Linear in the data, so it is stored as the
/// moment operator: second derivatives = moments() * values.
///
/// With fewer than four knots the single interpolating polynomial is used.
class CubicSplineBasis {
 public:
  CubicSplineBasis(int divisions, double span);

  int divisions() const { return divisions_; }
  double span() const { return span_; }
  double knot(int i) const { return span_ * i / divisions_; }

  /// Row of weights w such that s(x) = w . values.
  Eigen::RowVectorXd weights_at(double x) const;

  /// Weights for a set of sample positions, one row per position.
  Eigen::MatrixXd weights(const std::vector<double>& xs) const;

  /// Weights for `count` equally spaced samples covering [0, span].
  Eigen::MatrixXd lattice_weights(int count) const;

 private:
  int divisions_;
  double span_;
  double h_;
  Eigen::MatrixXd moments_;
};

/// `count` equally spaced points covering [0, span], endpoints included.
std::vector<double> lattice_points(int count, double span);

}  // namespace chainshell
