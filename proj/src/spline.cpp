#include "chainshell/spline.hpp"

#include <algorithm>
#include <cmath>

#include "chainshell/error.hpp"

namespace chainshell {

CubicSplineBasis::CubicSplineBasis(int divisions, double span)
    : divisions_(divisions), span_(span), h_(span / divisions) {
  if (divisions < 1) throw ParameterError("spline needs at least one division");
  if (!(span > 0.0)) throw ParameterError("spline span must be positive");
  const int n = divisions + 1;
  if (n < 4) return;

  // Moment equations M[j-1] + 4 M[j] + M[j+1] = 6/h^2 (y[j-1] - 2 y[j] + y[j+1])
  // closed by continuity of the third derivative at the second and penultimate knots.
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, n);
  const double s = 6.0 / (h_ * h_);
  for (int j = 1; j < n - 1; ++j) {
    lhs(j, j - 1) = 1.0;
    lhs(j, j) = 4.0;
    lhs(j, j + 1) = 1.0;
    rhs(j, j - 1) = s;
    rhs(j, j) = -2.0 * s;
    rhs(j, j + 1) = s;
  }
  lhs(0, 0) = 1.0;
  lhs(0, 1) = -2.0;
  lhs(0, 2) = 1.0;
  lhs(n - 1, n - 3) = 1.0;
  lhs(n - 1, n - 2) = -2.0;
  lhs(n - 1, n - 1) = 1.0;
  moments_ = lhs.partialPivLu().solve(rhs);
}

Eigen::RowVectorXd CubicSplineBasis::weights_at(double x) const {
  const int n = divisions_ + 1;
  Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(n);
  x = std::clamp(x, 0.0, span_);

  if (n < 4) {
    for (int j = 0; j < n; ++j) {
      double l = 1.0;
      for (int m = 0; m < n; ++m) {
        if (m != j) l *= (x - knot(m)) / (knot(j) - knot(m));
      }
      w(j) = l;
    }
    return w;
  }

  const int seg = std::min(static_cast<int>(x / h_), divisions_ - 1);
  const double t = (x - knot(seg)) / h_;
  const double u = 1.0 - t;
  w(seg) += u;
  w(seg + 1) += t;
  const double h2 = h_ * h_ / 6.0;
  w += (h2 * (u * u * u - u)) * moments_.row(seg);
  w += (h2 * (t * t * t - t)) * moments_.row(seg + 1);
  return w;
}

Eigen::MatrixXd CubicSplineBasis::weights(const std::vector<double>& xs) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), divisions_ + 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = weights_at(xs[i]);
  }
  return out;
}

Eigen::MatrixXd CubicSplineBasis::lattice_weights(int count) const {
  return weights(lattice_points(count, span_));
}

std::vector<double> lattice_points(int count, double span) {
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    xs[static_cast<std::size_t>(i)] = count == 1 ? 0.0 : span * i / (count - 1);
  }
  if (count > 1) xs.back() = span;
  return xs;
}

}  // namespace chainshell
