#include "emakit/fast.hpp"

#include <algorithm>

#include "emakit/errors.hpp"

namespace emakit {

namespace {

double pair_strength(std::span<const int> features, std::size_t n_rows, std::size_t n_cols,
                     int fi, int fj, int levels_i, int levels_j,
                     std::span<const double> residuals) {
  if (levels_i < 2 || levels_j < 2) return 0.0;
  const auto la = static_cast<std::size_t>(levels_i);
  const auto lb = static_cast<std::size_t>(levels_j);
  std::vector<double> count(la * lb, 0.0);
  std::vector<double> sum(la * lb, 0.0);
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto a = static_cast<std::size_t>(features[r * n_cols + static_cast<std::size_t>(fi)]);
    const auto b = static_cast<std::size_t>(features[r * n_cols + static_cast<std::size_t>(fj)]);
    count[a * lb + b] += 1.0;
    sum[a * lb + b] += residuals[r];
  }

  // Inclusive 2-D cumulative sums.
  for (std::size_t a = 0; a < la; ++a) {
    for (std::size_t b = 1; b < lb; ++b) {
      count[a * lb + b] += count[a * lb + b - 1];
      sum[a * lb + b] += sum[a * lb + b - 1];
    }
  }
  for (std::size_t a = 1; a < la; ++a) {
    for (std::size_t b = 0; b < lb; ++b) {
      count[a * lb + b] += count[(a - 1) * lb + b];
      sum[a * lb + b] += sum[(a - 1) * lb + b];
    }
  }

  const double total_count = count[(la - 1) * lb + (lb - 1)];
  const double total_sum = sum[(la - 1) * lb + (lb - 1)];

  double best = 0.0;
  for (std::size_t ca = 0; ca + 1 < la; ++ca) {
    for (std::size_t cb = 0; cb + 1 < lb; ++cb) {
      const double c00 = count[ca * lb + cb];
      const double s00 = sum[ca * lb + cb];
      const double c01 = count[ca * lb + (lb - 1)] - c00;
      const double s01 = sum[ca * lb + (lb - 1)] - s00;
      const double c10 = count[(la - 1) * lb + cb] - c00;
      const double s10 = sum[(la - 1) * lb + cb] - s00;
      const double c11 = total_count - c00 - c01 - c10;
      const double s11 = total_sum - s00 - s01 - s10;
      double gain = 0.0;
      if (c00 > 0.0) gain += s00 * s00 / c00;
      if (c01 > 0.0) gain += s01 * s01 / c01;
      if (c10 > 0.0) gain += s10 * s10 / c10;
      if (c11 > 0.0) gain += s11 * s11 / c11;
      if (gain > best) best = gain;
    }
  }
  return best;
}

std::vector<InteractionStrength> rank_impl(std::span<const int> features, std::size_t n_rows,
                                           std::size_t n_cols, std::span<const int> levels,
                                           std::span<const double> residuals,
                                           std::size_t max_pairs, bool parallel) {
  if (residuals.size() != n_rows) throw ConfigError("rank_interactions: residual length mismatch");
  if (levels.size() != n_cols) throw ConfigError("rank_interactions: levels length mismatch");
  if (n_cols < 2) return {};

  std::vector<InteractionStrength> ranking;
  ranking.reserve(n_cols * (n_cols - 1) / 2);
  for (std::size_t i = 0; i + 1 < n_cols; ++i) {
    for (std::size_t j = i + 1; j < n_cols; ++j) {
      ranking.push_back({static_cast<int>(i), static_cast<int>(j), 0.0});
    }
  }

  const auto n_pairs = static_cast<std::ptrdiff_t>(ranking.size());
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (std::ptrdiff_t p = 0; p < n_pairs; ++p) {
    auto& entry = ranking[static_cast<std::size_t>(p)];
    entry.strength =
        pair_strength(features, n_rows, n_cols, entry.feature_i, entry.feature_j,
                      levels[static_cast<std::size_t>(entry.feature_i)],
                      levels[static_cast<std::size_t>(entry.feature_j)], residuals);
  }

  std::sort(ranking.begin(), ranking.end(),
            [](const InteractionStrength& a, const InteractionStrength& b) {
              if (a.strength != b.strength) return a.strength > b.strength;
              if (a.feature_i != b.feature_i) return a.feature_i < b.feature_i;
              return a.feature_j < b.feature_j;
            });
  if (ranking.size() > max_pairs) ranking.resize(max_pairs);
  return ranking;
}

}  // namespace

std::vector<InteractionStrength> rank_interactions(std::span<const int> features,
                                                   std::size_t n_rows, std::size_t n_cols,
                                                   std::span<const int> levels,
                                                   std::span<const double> residuals,
                                                   std::size_t max_pairs) {
  return rank_impl(features, n_rows, n_cols, levels, residuals, max_pairs, true);
}

std::vector<InteractionStrength> rank_interactions_serial(std::span<const int> features,
                                                          std::size_t n_rows, std::size_t n_cols,
                                                          std::span<const int> levels,
                                                          std::span<const double> residuals,
                                                          std::size_t max_pairs) {
  return rank_impl(features, n_rows, n_cols, levels, residuals, max_pairs, false);
}

}  // namespace emakit
