#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace symtest {

/// What a stream is used for. Distinct purposes under the same
/// (replicate, bootstrap) pair never share draws.
enum class Purpose : std::uint32_t {
  Data = 1,
  GridU = 2,
  GridV = 3,
  Sphere = 4,
  Resample = 5,
  // Second attempt of an elliptical bootstrap replicate whose resampled
  // sample came out singular.
  SphereRedraw = 6,
  ResampleRedraw = 7,
};

struct StreamKey {
  std::uint64_t replicate = 0;
  std::uint64_t bootstrap = 0;
  Purpose purpose = Purpose::Data;
};

/// A reproducible random stream. The engine seed is a SplitMix64 hash of
/// (master_seed, replicate, bootstrap, purpose), so the draws depend only on
/// the key and never on which thread consumes them.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamKey key);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  const StreamKey& key() const noexcept { return key_; }

  // Uniform on [0, 1).
  double uniform() { return unif_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); }
  // Gamma with density proportional to x^(shape-1) exp(-x/scale).
  double gamma(double shape, double scale);
  double exponential(double rate);
  double chi_squared(double df);
  // Uniform on {0, ..., n-1}.
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t master_seed_;
  StreamKey key_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t derive_seed(std::uint64_t master_seed, const StreamKey& key);

}  // namespace symtest
