#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>

namespace bntune {

using Seed = std::uint64_t;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a path of stream
/// ids, e.g. derive_seed(seed, {fold}) or derive_seed(seed, {config, fold}).
Seed derive_seed(Seed base, std::initializer_list<std::uint64_t> path) noexcept;

/// Counter-based SplitMix64 generator. Output i is mix64(key + i * golden), so
/// a stream is fully determined by its key and never depends on which thread
/// consumes it. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(Seed seed) noexcept : key_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }
  result_type next() noexcept {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix64(key_ + counter_);
  }

  /// Child generator for a sub-stream; does not advance this generator.
  Rng split(std::uint64_t stream) const noexcept { return Rng(derive_seed(key_, {stream})); }

  /// Uniform integer in [0, n). n must be > 0. Unbiased (Lemire's method).
  std::size_t uniform_index(std::size_t n) noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bntune
