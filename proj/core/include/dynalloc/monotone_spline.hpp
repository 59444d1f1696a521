#pragma once

#include <vector>

namespace dynalloc {

/// Shape-preserving piecewise cubic Hermite interpolant of non-decreasing data.
///
/// Knot slopes use the weighted harmonic mean of neighbouring secants, so the
/// interpolant never overshoots its data. Outside the knot range the end
/// values are held.
class MonotoneSpline {
 public:
  MonotoneSpline() = default;

  /// Throws InvalidInput unless x is strictly increasing, y is non-decreasing,
  /// both are finite and there are at least two knots.
  MonotoneSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;

  /// Smallest-interval bisection for s(x) = y on the knot range. Values beyond
  /// the end knots return the end abscissae.
  double inverse(double y) const;

  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& slopes() const { return m_; }
  bool empty() const { return x_.empty(); }
  double front_x() const { return x_.front(); }
  double back_x() const { return x_.back(); }

 private:
  std::size_t interval(double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

/// Pool-adjacent-violators projection onto non-decreasing sequences
/// (least squares, optional positive weights).
std::vector<double> isotonic_regression(const std::vector<double>& y, const std::vector<double>& weights = {});

}  // namespace dynalloc
