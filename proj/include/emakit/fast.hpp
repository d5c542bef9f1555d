#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace emakit {

struct InteractionStrength {
  int feature_i = 0;  // always feature_i < feature_j
  int feature_j = 0;
  double strength = 0.0;  // residual-SSE reduction of the best 4-quadrant cut
};

// Ranks every feature pair by how much of the residual sum of squares the
// best axis-aligned quadrant predictor removes. Each pair is scanned over
// 2-D cumulative (count, residual-sum) histograms, so a pair costs
// O(n + levels_i * levels_j). Pairs are independent; the scan runs across
// OpenMP threads and is bit-identical to the serial reference.
//
// Returns pairs sorted by strength descending (ties by index), truncated to
// max_pairs. Fewer than two features yields an empty ranking.
std::vector<InteractionStrength> rank_interactions(std::span<const int> features,
                                                   std::size_t n_rows, std::size_t n_cols,
                                                   std::span<const int> levels,
                                                   std::span<const double> residuals,
                                                   std::size_t max_pairs);

// Serial reference implementation, kept for tests and benchmarks.
std::vector<InteractionStrength> rank_interactions_serial(std::span<const int> features,
                                                          std::size_t n_rows, std::size_t n_cols,
                                                          std::span<const int> levels,
                                                          std::span<const double> residuals,
                                                          std::size_t max_pairs);

}  // namespace emakit
