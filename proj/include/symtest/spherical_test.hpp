#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "symtest/linalg.hpp"
#include "symtest/statistic.hpp"

namespace symtest {

enum class GridMode {
  // Every bootstrap replicate draws its own directions (the default).
  Fresh,
  // Bootstrap replicates reuse the directions of the observed statistic.
  Shared,
};

struct BootstrapConfig {
  std::size_t B = 100;
  std::size_t nu = 1000;
  std::size_t nc = 500;
  double c0 = 10.0;
  double alpha = 0.05;
  std::uint64_t master_seed = 1;
  Pairing pairing = Pairing::Paired;
  GridMode grid_mode = GridMode::Fresh;
  ThresholdMode thresholds = ThresholdMode::Grid;
  // <= 0: OpenMP default. Bootstrap replicates are the unit of parallelism.
  int threads = 0;

  void validate() const;
};

struct TestReport {
  double statistic = 0.0;
  std::vector<double> boot_stats;
  double quantile = 0.0;
  double p_value = 1.0;
  bool reject = false;
  BootstrapConfig config;
  double wall_time = 0.0;  // seconds

  std::size_t n = 0;
  std::size_t d = 0;
  StatValue argmax;
  std::size_t zero_norm_count = 0;
  // Hill estimate of the tail index of the norms; NaN when n is too small.
  double radial_tail_index = 0.0;
  std::vector<std::string> warnings;
};

/// The ceil(p * B)-th order statistic.
double empirical_quantile(std::span<const double> values, double p);

/// (1 + #{b : boot[b] >= statistic}) / (B + 1).
double bootstrap_p_value(double statistic, std::span<const double> boot);

/// Hill estimator on the top floor(sqrt(n)) norms.
double radial_tail_index(std::span<const double> norms);

struct BootstrapSample {
  SampleMatrix x;
  // The resampled norms R*_i; x row i is radii[i] times a unit vector.
  std::vector<double> radii;
};

/// One spherically symmetric bootstrap sample: norms resampled from `pool`
/// times independent uniform directions, from the Resample and Sphere
/// streams of (master_seed, replicate, bootstrap).
BootstrapSample spherical_bootstrap_sample(std::span<const double> pool,
                                           std::size_t d, std::uint64_t master_seed,
                                           std::uint64_t replicate,
                                           std::uint64_t bootstrap,
                                           bool redraw = false);

/// Bootstrap statistics b = 1..B for the observed sample x.
std::vector<double> bootstrap_stats_spherical(const SampleMatrix& x,
                                              const BootstrapConfig& cfg,
                                              std::uint64_t replicate = 0);

/// Full test of spherical symmetry about the origin. `replicate` keys the
/// random streams so that Monte Carlo replicates stay independent.
TestReport test_spherical(const SampleMatrix& x, const BootstrapConfig& cfg,
                          std::uint64_t replicate = 0);

namespace detail {

int resolve_threads(int requested);

// Grid for bootstrap replicate b (b = 0 is the observed sample).
DirectionGrid grid_for(const BootstrapConfig& cfg, std::size_t d,
                       std::uint64_t replicate, std::uint64_t b);

StatisticOptions statistic_options(const BootstrapConfig& cfg, int threads);

// Fills quantile, p-value, decision and the norm diagnostics.
void finalize_report(TestReport& r, std::span<const double> norms);

}  // namespace detail

}  // namespace symtest
