#include "emakit/cv.hpp"

#include "emakit/errors.hpp"

namespace emakit {

std::optional<CvPlan> ts_cv_split(std::size_t n_rows, int k) {
  if (k < 1) throw ConfigError("ts_cv_split: k must be >= 1");
  const std::size_t n_blocks = static_cast<std::size_t>(k) + 1;
  if (n_rows < n_blocks) return std::nullopt;

  CvPlan plan;
  plan.n_rows = n_rows;
  plan.k = k;
  const std::size_t base = n_rows / n_blocks;
  const std::size_t remainder = n_rows % n_blocks;
  std::size_t begin = 0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::size_t size = base + (b < remainder ? 1 : 0);
    plan.blocks.emplace_back(begin, begin + size);
    begin += size;
  }
  for (std::size_t m = 1; m < n_blocks; ++m) {
    CvSplit split;
    split.train_end = plan.blocks[m].first;
    split.test_begin = plan.blocks[m].first;
    split.test_end = plan.blocks[m].second;
    plan.splits.push_back(split);
  }
  return plan;
}

}  // namespace emakit
