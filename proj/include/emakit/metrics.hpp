#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emakit {

// Exact ROC-AUC as the Mann-Whitney statistic with ties counted 1/2,
// computed by sort-and-rank in O(n log n). Returns nullopt when only one
// class is present (undefined metric, excluded from aggregates).
std::optional<double> roc_auc(std::span<const int> labels, std::span<const double> scores);

struct IndividualScore {
  std::string id;
  std::optional<double> auc;
};

struct AggregateStats {
  std::size_t n_defined = 0;
  std::size_t n_undefined = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population denominator
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::string> outlier_ids;  // outside q1/q3 -/+ 1.5 IQR
  std::optional<double> relative_change;
  std::vector<std::string> relative_change_excluded;  // baseline == 0 or missing
};

// Mean, population std, five-number summary with Tukey outliers, and the
// optional mean relative change against a baseline report (individuals with
// baseline AUC of zero are excluded and reported). Throws ConfigError when
// no defined score exists.
AggregateStats aggregate_scores(const std::vector<IndividualScore>& scores,
                                const std::vector<IndividualScore>* baseline = nullptr);

struct EvalReport {
  std::string method;
  std::vector<IndividualScore> per_individual;
  AggregateStats aggregate;
};

}  // namespace emakit
