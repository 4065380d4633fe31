#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/folds.hpp"

namespace hfl::pipeline {

// Partition of listing ids into k folds.
struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> ids;  // in dataset order
  std::vector<int> fold;          // aligned with ids

  int fold_of(std::int64_t id) const {
    const auto it = std::find(ids.begin(), ids.end(), id);
    require(it != ids.end(), ErrorKind::InvalidArgument, "id " + std::to_string(id) + " is not in the fold plan");
    return fold[static_cast<std::size_t>(it - ids.begin())];
  }

  // Row positions (into ids) of the test rows of fold f, or of all other folds.
  std::vector<std::size_t> rows_in(int f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] == f) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> rows_outside(int f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] != f) out.push_back(i);
    return out;
  }

  // The same assignment restricted to a subset of ids (in the given order).
  FoldPlan restrict(const std::vector<std::int64_t>& subset) const {
    std::unordered_map<std::int64_t, int> lookup;
    for (std::size_t i = 0; i < ids.size(); ++i) lookup[ids[i]] = fold[i];
    FoldPlan out{k, seed, {}, {}};
    for (auto id : subset) {
      const auto it = lookup.find(id);
      require(it != lookup.end(), ErrorKind::InvalidArgument, "id " + std::to_string(id) + " is not in the fold plan");
      out.ids.push_back(id);
      out.fold.push_back(it->second);
    }
    return out;
  }
};

inline FoldPlan make_folds(const std::vector<std::int64_t>& ids, int k, std::uint64_t seed) {
  require(k >= 2, ErrorKind::InvalidArgument, "need at least two folds");
  if (ids.size() < static_cast<std::size_t>(k))
    fail(ErrorKind::TooFewListings,
         std::to_string(ids.size()) + " listings cannot fill " + std::to_string(k) + " folds");
  return {k, seed, ids, assign_folds(ids.size(), k, seed)};
}

}  // namespace hfl::pipeline
