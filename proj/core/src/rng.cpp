#include "commsim/rng.hpp"

#include <stdexcept>

namespace commsim {

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

// Lemire's multiply-shift with rejection of the biased low band.
std::size_t RngStream::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::index: empty range");
  const auto bound = static_cast<std::uint64_t>(n);
  auto product = static_cast<u128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<u128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::size_t>(product >> 64);
}

std::size_t RngStream::categorical(std::span<const double> weights) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  const double u = uniform01() * sum;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  // Rounding can leave u just above the accumulated sum.
  return last_positive;
}

}  // namespace commsim
