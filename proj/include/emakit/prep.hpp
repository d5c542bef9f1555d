#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "emakit/types.hpp"

namespace emakit {

// How a raw observation maps to a binary event.
//
// CurrentRow labels each observation with its own outcome (used for data
// whose rows already carry the event, e.g. generated studies). The NextPoint
// modes label row i with the event of observation i+1, provided the
// successor falls within `max_gap` (inclusive); otherwise row i is dropped.
enum class OutcomeMode { CurrentRow, NextPointThreshold, NextPointCategories };

struct OutcomeRule {
  OutcomeMode mode = OutcomeMode::CurrentRow;
  double threshold = 0.5;                     // event when raw value >= threshold
  std::set<std::string> positive_categories;  // event when raw token is a member

  // Binary event for a raw outcome token; nullopt when the token is missing
  // or unparsable (the observation cannot serve as a label source).
  std::optional<int> event(const std::string& raw) const;
};

struct TargetBuildResult {
  SupervisedSet set;
  bool insufficient = false;  // no supervised rows could be built
  std::size_t dropped_gap = 0;
  std::size_t dropped_missing = 0;
};

// Builds next-time-point (or current-row) supervised rows from one series.
// Output preserves temporal order; never throws on sparse data, the
// `insufficient` flag reports an empty result instead.
TargetBuildResult build_targets(const IndividualSeries& series, const OutcomeRule& rule,
                                Minutes max_gap_minutes);

// Rewrites every series through build_targets, keeping the retained rows as
// labeled observations. The result feeds filter_individuals.
Study label_study(const Study& study, const OutcomeRule& rule, Minutes max_gap_minutes);

// Supervised rows from a series whose observations already carry outcomes.
SupervisedSet to_supervised(const IndividualSeries& series);

struct FilterParams {
  double min_daily_obs = 3.0;
  std::size_t min_total_rows = 30;
  std::size_t min_minority = 5;
  // Minority counts are evaluated on the leading train_frac of each series,
  // mirroring the split that follows.
  double train_frac = 0.7;
};

struct Exclusion {
  std::string individual_id;
  std::vector<std::string> reasons;  // subset of {"daily_obs", "total_rows", "minority"}
  double daily_obs = 0.0;
  std::size_t total_rows = 0;
  std::size_t minority_train = 0;
};

struct FilterResult {
  Study study;
  std::vector<Exclusion> exclusions;
  bool empty_study() const { return study.individuals.empty(); }
};

// Retains individuals meeting all three thresholds. Expects a labeled study
// (every observation carries an outcome). Idempotent.
FilterResult filter_individuals(const Study& labeled, const FilterParams& params);

struct SplitPair {
  SupervisedSet train;
  SupervisedSet test;
};

// First floor(n * train_frac) rows train, remainder test, no shuffling.
// nullopt when the split is impossible (n < 2 or either side empty).
std::optional<SplitPair> sequential_split(const SupervisedSet& set, double train_frac);

// floor(n * frac) guarded against representation error in n * frac.
std::size_t split_point(std::size_t n, double frac);

// Row-wise concatenation in the given individual order; provenance is kept
// per row. Throws DataError on column-count mismatch, naming both parties.
SupervisedSet pool_training_sets(
    const std::vector<std::pair<std::string, const SupervisedSet*>>& sets);

}  // namespace emakit
