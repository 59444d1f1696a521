#include "dynalloc/monotone_spline.hpp"

#include <algorithm>
#include <cmath>

#include "dynalloc/errors.hpp"

namespace dynalloc {

MonotoneSpline::MonotoneSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw InvalidInput("monotone spline: need at least two knots of matching size");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) throw InvalidInput("monotone spline: non-finite knot");
    if (i > 0 && !(x_[i] > x_[i - 1])) throw InvalidInput("monotone spline: abscissae must increase strictly");
    if (i > 0 && y_[i] < y_[i - 1]) throw InvalidInput("monotone spline: values must be non-decreasing");
  }

  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    d[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  m_.assign(n, 0.0);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k - 1] > 0.0 && d[k] > 0.0) {
      const double a = (h[k - 1] + 2.0 * h[k]) / (3.0 * (h[k - 1] + h[k]));
      m_[k] = d[k - 1] * d[k] / (a * d[k] + (1.0 - a) * d[k - 1]);
    }
  }
  // A flat end interval must not pick up slope from its neighbour.
  if (d[0] == 0.0) m_[0] = 0.0;
  if (d[n - 2] == 0.0) m_[n - 1] = 0.0;
}

std::size_t MonotoneSpline::interval(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - x_.begin() - 1, 0));
  return std::min(i, x_.size() - 2);
}

double MonotoneSpline::operator()(double x) const {
  if (x_.empty()) throw InvalidInput("monotone spline: evaluated before construction");
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * y_[k] + (t3 - 2.0 * t2 + t) * h * m_[k] + (-2.0 * t3 + 3.0 * t2) * y_[k + 1] +
         (t3 - t2) * h * m_[k + 1];
}

double MonotoneSpline::derivative(double x) const {
  if (x_.empty()) throw InvalidInput("monotone spline: evaluated before construction");
  if (x < x_.front() || x > x_.back()) return 0.0;
  const std::size_t k = interval(x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  return (6.0 * t2 - 6.0 * t) * y_[k] / h + (3.0 * t2 - 4.0 * t + 1.0) * m_[k] + (-6.0 * t2 + 6.0 * t) * y_[k + 1] / h +
         (3.0 * t2 - 2.0 * t) * m_[k + 1];
}

double MonotoneSpline::inverse(double y) const {
  if (x_.empty()) throw InvalidInput("monotone spline: evaluated before construction");
  if (y <= y_.front()) return x_.front();
  if (y >= y_.back()) return x_.back();
  // First knot whose value reaches y brackets the root from above.
  const auto it = std::lower_bound(y_.begin(), y_.end(), y);
  const auto hi_idx = static_cast<std::size_t>(it - y_.begin());
  double lo = x_[hi_idx - 1];
  double hi = x_[hi_idx];
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

std::vector<double> isotonic_regression(const std::vector<double>& y, const std::vector<double>& weights) {
  if (!weights.empty() && weights.size() != y.size()) throw InvalidInput("isotonic regression: weight size mismatch");
  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) throw InvalidInput("isotonic regression: weights must be positive");
    blocks.push_back({y[i], w, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w_sum = a.weight + b.weight;
      a.mean = (a.mean * a.weight + b.mean * b.weight) / w_sum;
      a.weight = w_sum;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

}  // namespace dynalloc
