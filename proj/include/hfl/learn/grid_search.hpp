#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/folds.hpp"

namespace hfl::learn {

struct GridResult {
  std::size_t best = 0;
  std::vector<double> mean_scores;                // per configuration
  std::vector<std::vector<double>> fold_scores;  // [config][fold]
};

// Cross-validated selection over an ordered space. score(candidate, train,
// validation) returns a validation MSE; every candidate sees the same folds.
// The lowest mean wins and ties go to the earlier candidate.
template <class Candidate, class Score>
GridResult grid_search(const std::vector<Candidate>& space, std::size_t n, int k, std::uint64_t seed,
                       Score&& score) {
  require(!space.empty(), ErrorKind::InvalidArgument, "grid search needs a nonempty space");
  const std::vector<int> fold = assign_folds(n, k, seed);
  GridResult r;
  r.mean_scores.assign(space.size(), 0.0);
  r.fold_scores.assign(space.size(), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < space.size(); ++c) {
    for (int f = 0; f < k; ++f) {
      std::vector<std::size_t> train, val;
      for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? val : train).push_back(i);
      r.fold_scores[c][static_cast<std::size_t>(f)] = score(space[c], train, val);
    }
    const auto& s = r.fold_scores[c];
    r.mean_scores[c] = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(k);
    if (r.mean_scores[c] < best) {
      best = r.mean_scores[c];
      r.best = c;
    }
  }
  return r;
}

}  // namespace hfl::learn
