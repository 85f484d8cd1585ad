#include "symtest/rng.hpp"

namespace symtest {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, const StreamKey& key) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ key.replicate);
  h = splitmix64(h ^ key.bootstrap);
  h = splitmix64(h ^ static_cast<std::uint64_t>(key.purpose));
  return h;
}

RngStream::RngStream(std::uint64_t master_seed, StreamKey key)
    : master_seed_(master_seed),
      key_(key),
      engine_(derive_seed(master_seed, key)) {}

double RngStream::gamma(double shape, double scale) {
  std::gamma_distribution<double> g(shape, scale);
  return g(engine_);
}

double RngStream::exponential(double rate) {
  std::exponential_distribution<double> e(rate);
  return e(engine_);
}

double RngStream::chi_squared(double df) { return gamma(0.5 * df, 2.0); }

std::size_t RngStream::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  return pick(engine_);
}

}  // namespace symtest
