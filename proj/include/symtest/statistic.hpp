#pragma once

// Kolmogorov-Smirnov type statistic over the projection-indicator class
//
//   f_{u,v,c}(x) = (v - (v.u) u).x * 1{u.x >= c},
//
// whose expectations all vanish under spherical symmetry. The statistic is
// sqrt(n) times the largest |empirical mean of f| over a finite grid of
// direction pairs and thresholds.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "symtest/linalg.hpp"

namespace symtest {

enum class Pairing {
  // (u_k, v_k) for k = 1..Nu.
  Paired,
  // Every (u_k, v_l), Nu * Nu pairs.
  FullProduct,
};

enum class ThresholdMode {
  // Thresholds restricted to the grid c_j.
  Grid,
  // Supremum over every real c; the grid is ignored. Diagnostic only.
  ExactSupremum,
};

struct DirectionGrid {
  std::size_t dim = 0;
  std::size_t nu = 0;
  std::vector<double> u;  // nu x dim, row-major, unit rows
  std::vector<double> v;  // nu x dim, row-major, unit rows
  double c0 = 0.0;
  std::size_t nc = 0;
  std::vector<double> c_values;  // strictly increasing
  // True when c_values came from threshold_grid(); enables O(1) cell lookup.
  bool uniform_thresholds = false;

  std::span<const double> u_row(std::size_t k) const {
    return {u.data() + k * dim, dim};
  }
  std::span<const double> v_row(std::size_t k) const {
    return {v.data() + k * dim, dim};
  }

  // Checks unit norms and increasing thresholds; throws InvalidSpec.
  void validate() const;

  /// Grid with caller-chosen directions and thresholds (any increasing list).
  static DirectionGrid custom(std::size_t dim, std::vector<double> u,
                              std::vector<double> v,
                              std::vector<double> c_values);
};

struct StatValue {
  double t = 0.0;
  // Pair index (k for paired grids, k * nu + l for the full product) and
  // threshold index of the first maximizer in (k, j) order. In
  // ExactSupremum mode j is the number of sorted projections below the
  // maximizing threshold.
  std::size_t k = 0;
  std::size_t j = 0;
  std::size_t n = 0;
};

struct StatisticOptions {
  Pairing pairing = Pairing::Paired;
  ThresholdMode thresholds = ThresholdMode::Grid;
  // <= 0 means the OpenMP default. Forced to 1 inside a parallel region.
  int threads = 0;
};

/// {-c0 + 2 c0 j / nc : j = 0..nc}.
std::vector<double> threshold_grid(std::size_t nc, double c0);

/// Draws U and V uniformly on the sphere from the GridU / GridV streams of
/// (master_seed, replicate, bootstrap). Requires nu >= 1, nc >= 1, c0 >= 2,
/// d >= 2.
DirectionGrid make_grid(std::size_t d, std::size_t nu, std::size_t nc, double c0,
                        std::uint64_t master_seed, std::uint64_t replicate,
                        std::uint64_t bootstrap);

// w = v - (v.u) u, the component of v orthogonal to u.
void orthogonal_component(std::span<const double> u, std::span<const double> v,
                          std::span<double> w);

double eval_f(std::span<const double> u, std::span<const double> v, double c,
              std::span<const double> x);

/// Fast path. For each pair, projects the sample on u and w, bins the
/// projections by threshold cell and accumulates compensated suffix sums;
/// O(n + nc) per pair instead of O(n * nc). Pairs run in parallel under
/// OpenMP; the reduction is deterministic.
StatValue ks_statistic(const SampleMatrix& x, const DirectionGrid& grid,
                       const StatisticOptions& opts = {});

/// Serial reference: direct triple loop over pairs, thresholds and
/// observations, evaluating eval_f each time.
StatValue ks_statistic_brute(const SampleMatrix& x, const DirectionGrid& grid,
                             Pairing pairing = Pairing::Paired);

/// Serial reference for ThresholdMode::ExactSupremum: tries every observed
/// projection as a threshold, plus +infinity.
StatValue ks_statistic_exact_brute(const SampleMatrix& x,
                                   const DirectionGrid& grid,
                                   Pairing pairing = Pairing::Paired);

}  // namespace symtest
