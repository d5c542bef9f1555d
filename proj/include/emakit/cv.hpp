#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace emakit {

// Expanding-window plan: rows are cut into k+1 contiguous ordered blocks and
// split m (1-based) trains on blocks 1..m and tests on block m+1.
struct CvSplit {
  std::size_t train_end = 0;   // train rows are [0, train_end)
  std::size_t test_begin = 0;  // == train_end
  std::size_t test_end = 0;
};

struct CvPlan {
  std::size_t n_rows = 0;
  int k = 0;
  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // [begin, end)
  std::vector<CvSplit> splits;
};

// k+1 near-equal contiguous blocks, remainder spread over the earliest ones.
// nullopt when n_rows <= k (infeasible).
std::optional<CvPlan> ts_cv_split(std::size_t n_rows, int k);

}  // namespace emakit
