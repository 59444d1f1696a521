#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dynalloc/errors.hpp"
#include "dynalloc/monotone_spline.hpp"

using namespace dynalloc;

TEST(MonotoneSpline, ReproducesKnotsAndLines) {
  const MonotoneSpline line({0.0, 1.0, 3.0, 4.0}, {1.0, 3.0, 7.0, 9.0});
  for (double x = 0.0; x <= 4.0; x += 0.05) EXPECT_NEAR(line(x), 1.0 + 2.0 * x, 1e-12);
  const MonotoneSpline s({0.0, 1.0, 2.0, 5.0}, {0.0, 0.1, 0.9, 1.0});
  EXPECT_DOUBLE_EQ(s(1.0), 0.1);
  EXPECT_DOUBLE_EQ(s(2.0), 0.9);
  EXPECT_DOUBLE_EQ(s(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(s(9.0), 1.0);
}

TEST(MonotoneSpline, MonotoneBetweenKnots) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> step(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x{0.0}, y{0.0};
    for (int i = 0; i < 12; ++i) {
      x.push_back(x.back() + 0.1 + step(rng));
      // Flat stretches included on purpose.
      y.push_back(y.back() + (step(rng) < 0.3 ? 0.0 : step(rng)));
    }
    const MonotoneSpline s(x, y);
    double prev = s(x.front());
    for (double v = x.front(); v <= x.back(); v += 0.01) {
      const double cur = s(v);
      ASSERT_GE(cur, prev - 1e-14);
      prev = cur;
    }
  }
}

TEST(MonotoneSpline, InverseRoundTrip) {
  const MonotoneSpline s({5.0, 10.0, 15.0, 20.0, 25.0}, {0.0, 0.05, 0.5, 0.9, 1.0});
  for (double y = 0.0; y <= 1.0; y += 0.01) EXPECT_NEAR(s(s.inverse(y)), y, 1e-10);
}

TEST(MonotoneSpline, RejectsBadKnots) {
  EXPECT_THROW(MonotoneSpline({0.0, 0.0, 1.0}, {0.0, 1.0, 2.0}), InvalidInput);
  EXPECT_THROW(MonotoneSpline({0.0, 1.0, 2.0}, {0.0, 2.0, 1.0}), InvalidInput);
  EXPECT_THROW(MonotoneSpline({0.0, 1.0}, {0.0}), InvalidInput);
}

TEST(IsotonicRegression, PoolsViolators) {
  const auto r = isotonic_regression({1.0, 3.0, 2.0, 4.0});
  ASSERT_EQ(r.size(), 4u);
  EXPECT_DOUBLE_EQ(r[0], 1.0);
  EXPECT_DOUBLE_EQ(r[1], 2.5);
  EXPECT_DOUBLE_EQ(r[2], 2.5);
  EXPECT_DOUBLE_EQ(r[3], 4.0);
  const auto w = isotonic_regression({3.0, 1.0}, {3.0, 1.0});
  EXPECT_DOUBLE_EQ(w[0], 2.5);
  EXPECT_DOUBLE_EQ(w[1], 2.5);
  const auto sorted = isotonic_regression({0.0, 0.2, 0.2, 0.7});
  EXPECT_EQ(sorted, (std::vector<double>{0.0, 0.2, 0.2, 0.7}));
}
