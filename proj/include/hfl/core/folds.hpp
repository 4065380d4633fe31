#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/random.hpp"

namespace hfl {

// Fold index per position 0..n-1: a seeded shuffle dealt round-robin, so fold
// sizes differ by at most one.
inline std::vector<int> assign_folds(std::size_t n, int k, std::uint64_t seed) {
  require(k >= 2, ErrorKind::InvalidArgument, "need at least two folds");
  require(n >= static_cast<std::size_t>(k), ErrorKind::TooFewListings,
          "fewer rows (" + std::to_string(n) + ") than folds (" + std::to_string(k) + ")");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<int> fold(n);
  for (std::size_t r = 0; r < n; ++r) fold[order[r]] = static_cast<int>(r % static_cast<std::size_t>(k));
  return fold;
}

}  // namespace hfl
