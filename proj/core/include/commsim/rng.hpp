#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace commsim {

/// Seeded pseudo-random stream used by one simulation run.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The mapping from raw 64-bit words to doubles, indices and
/// categorical draws is implemented here rather than through <random>'s
/// distributions, whose algorithms are implementation-defined. Together this
/// makes a (seed, call sequence) pair reproduce bit-identically on any
/// conforming toolchain.
class RngStream {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/lemire-u64/u53-double";

  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Unbiased uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  /// Index i drawn with probability weights[i] / sum(weights).
  /// Zero-weight entries are never returned.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace commsim
