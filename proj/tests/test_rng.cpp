#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "symtest/rng.hpp"

namespace symtest {
namespace {

TEST(RngStream, SameKeySameSequence) {
  RngStream a(7, {3, 4, Purpose::Sphere});
  RngStream b(7, {3, 4, Purpose::Sphere});
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.normal(), b.normal());
    ASSERT_EQ(a.uniform(), b.uniform());
    ASSERT_EQ(a.gamma(2.5, 1.0), b.gamma(2.5, 1.0));
  }
}

TEST(RngStream, DistinctKeysGiveDistinctSeeds) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t r = 0; r < 20; ++r) {
    for (std::uint64_t b = 0; b < 20; ++b) {
      for (auto p : {Purpose::Data, Purpose::GridU, Purpose::GridV, Purpose::Sphere,
                     Purpose::Resample, Purpose::SphereRedraw, Purpose::ResampleRedraw}) {
        seeds.insert(derive_seed(1, {r, b, p}));
      }
    }
  }
  EXPECT_EQ(seeds.size(), 20u * 20u * 7u);
  EXPECT_NE(derive_seed(1, {0, 0, Purpose::Data}), derive_seed(2, {0, 0, Purpose::Data}));
  // Swapping replicate and bootstrap must not collide.
  EXPECT_NE(derive_seed(1, {1, 2, Purpose::Data}), derive_seed(1, {2, 1, Purpose::Data}));
}

TEST(RngStream, NeighbouringStreamsUncorrelated) {
  RngStream a(1, {0, 0, Purpose::Data});
  RngStream b(1, {1, 0, Purpose::Data});
  const int n = 20000;
  double sab = 0.0;
  for (int i = 0; i < n; ++i) sab += a.normal() * b.normal();
  EXPECT_LT(std::abs(sab / n), 4.0 / std::sqrt(n));
}

TEST(RngStream, UniformAndIndexRanges) {
  RngStream r(5, {});
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform(-2.0, 3.0);
    ASSERT_GE(v, -2.0);
    ASSERT_LT(v, 3.0);
    ASSERT_LT(r.index(7), 7u);
  }
}

TEST(RngStream, GammaMoments) {
  RngStream r(11, {});
  for (auto [shape, scale] : {std::pair{0.5, 2.0}, {2.0, 3.0}, {10.5, 1.0}, {1.0, 0.5}}) {
    const int n = 100000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = r.gamma(shape, scale);
      s += g;
      s2 += g * g;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    const double true_mean = shape * scale;
    const double true_var = shape * scale * scale;
    EXPECT_NEAR(mean, true_mean, 5.0 * std::sqrt(true_var / n)) << shape << "," << scale;
    EXPECT_NEAR(var / true_var, 1.0, 0.05) << shape << "," << scale;
  }
}

TEST(RngStream, ExponentialAndChiSquaredMeans) {
  RngStream r(12, {});
  const int n = 100000;
  double se = 0.0;
  double sc = 0.0;
  for (int i = 0; i < n; ++i) {
    se += r.exponential(2.0);
    sc += r.chi_squared(5.0);
  }
  EXPECT_NEAR(se / n, 0.5, 0.01);
  EXPECT_NEAR(sc / n, 5.0, 0.05);
}

}  // namespace
}  // namespace symtest
