#include "emakit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "emakit/errors.hpp"

namespace emakit {

std::optional<double> roc_auc(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw ConfigError("roc_auc: length mismatch");
  if (labels.empty()) throw ConfigError("roc_auc: empty input");

  const std::size_t n = labels.size();
  std::size_t n_pos = 0;
  for (int label : labels) n_pos += label == 1 ? 1 : 0;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks over tied score runs; accumulate ranks of positives.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j;
  }

  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

// Linear-interpolation quantile on a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

}  // namespace

AggregateStats aggregate_scores(const std::vector<IndividualScore>& scores,
                                const std::vector<IndividualScore>* baseline) {
  AggregateStats stats;
  std::vector<double> defined;
  for (const auto& s : scores) {
    if (s.auc) {
      defined.push_back(*s.auc);
    } else {
      ++stats.n_undefined;
    }
  }
  if (defined.empty()) throw ConfigError("aggregate_scores: no defined AUC values");
  stats.n_defined = defined.size();

  const double n = static_cast<double>(defined.size());
  stats.mean = std::accumulate(defined.begin(), defined.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : defined) ss += (v - stats.mean) * (v - stats.mean);
  stats.stddev = std::sqrt(ss / n);

  std::vector<double> sorted = defined;
  std::sort(sorted.begin(), sorted.end());
  stats.min = sorted.front();
  stats.max = sorted.back();
  stats.median = quantile_sorted(sorted, 0.5);
  stats.q1 = quantile_sorted(sorted, 0.25);
  stats.q3 = quantile_sorted(sorted, 0.75);

  const double iqr = stats.q3 - stats.q1;
  const double lo = stats.q1 - 1.5 * iqr;
  const double hi = stats.q3 + 1.5 * iqr;
  for (const auto& s : scores) {
    if (s.auc && (*s.auc < lo || *s.auc > hi)) stats.outlier_ids.push_back(s.id);
  }

  if (baseline != nullptr) {
    std::map<std::string, double> base;
    for (const auto& b : *baseline) {
      if (b.auc) base[b.id] = *b.auc;
    }
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : scores) {
      if (!s.auc) continue;
      const auto it = base.find(s.id);
      if (it == base.end()) {
        stats.relative_change_excluded.push_back(s.id);
        continue;
      }
      if (it->second == 0.0) {
        stats.relative_change_excluded.push_back(s.id);
        continue;
      }
      sum += (*s.auc - it->second) / it->second;
      ++count;
    }
    if (count > 0) stats.relative_change = sum / static_cast<double>(count);
  }
  return stats;
}

}  // namespace emakit
