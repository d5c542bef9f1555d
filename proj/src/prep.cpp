#include "emakit/prep.hpp"

#include <cmath>
#include <cstdlib>
#include <set>

#include "emakit/errors.hpp"

namespace emakit {

std::optional<int> OutcomeRule::event(const std::string& raw) const {
  if (raw.empty()) return std::nullopt;
  switch (mode) {
    case OutcomeMode::NextPointCategories:
      return positive_categories.count(raw) ? 1 : 0;
    case OutcomeMode::CurrentRow:
    case OutcomeMode::NextPointThreshold: {
      char* end = nullptr;
      const double value = std::strtod(raw.c_str(), &end);
      if (end == raw.c_str()) return std::nullopt;
      return value >= threshold ? 1 : 0;
    }
  }
  return std::nullopt;
}

TargetBuildResult build_targets(const IndividualSeries& series, const OutcomeRule& rule,
                                Minutes max_gap_minutes) {
  if (max_gap_minutes <= 0) throw ConfigError("build_targets: max_gap must be positive");
  for (std::size_t i = 1; i < series.observations.size(); ++i) {
    if (series.observations[i].timestamp < series.observations[i - 1].timestamp) {
      throw DataError("individual '" + series.individual_id + "': series not time-ordered");
    }
  }

  TargetBuildResult result;
  const auto& obs = series.observations;

  if (rule.mode == OutcomeMode::CurrentRow) {
    for (const auto& o : obs) {
      std::optional<int> label = o.outcome;
      if (!label) label = rule.event(o.raw_outcome);
      if (!label) {
        ++result.dropped_missing;
        continue;
      }
      result.set.append_row(o.features, *label, o.timestamp, series.individual_id);
    }
  } else {
    for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
      const auto& next = obs[i + 1];
      if (next.timestamp - obs[i].timestamp > max_gap_minutes) {
        ++result.dropped_gap;
        continue;
      }
      std::optional<int> label = rule.event(next.raw_outcome);
      if (!label) label = next.outcome;
      if (!label) {
        ++result.dropped_missing;
        continue;
      }
      result.set.append_row(obs[i].features, *label, obs[i].timestamp, series.individual_id);
    }
  }

  if (result.set.n_rows() == 0 && !obs.empty()) {
    result.set.n_cols = obs.front().features.size();
  }
  result.insufficient = result.set.n_rows() == 0;
  return result;
}

Study label_study(const Study& study, const OutcomeRule& rule, Minutes max_gap_minutes) {
  Study labeled;
  labeled.schema = study.schema;
  labeled.metadata = study.metadata;
  for (const auto& series : study.individuals) {
    const TargetBuildResult built = build_targets(series, rule, max_gap_minutes);
    IndividualSeries out;
    out.individual_id = series.individual_id;
    for (std::size_t r = 0; r < built.set.n_rows(); ++r) {
      Observation o;
      o.timestamp = built.set.row_timestamps[r];
      const auto row = built.set.row(r);
      o.features.assign(row.begin(), row.end());
      o.outcome = built.set.labels[r];
      out.observations.push_back(std::move(o));
    }
    labeled.individuals.push_back(std::move(out));
  }
  return labeled;
}

SupervisedSet to_supervised(const IndividualSeries& series) {
  SupervisedSet set;
  for (const auto& obs : series.observations) {
    if (!obs.outcome) {
      throw DataError("individual '" + series.individual_id +
                      "': observation without outcome in to_supervised");
    }
    set.append_row(obs.features, *obs.outcome, obs.timestamp, series.individual_id);
  }
  return set;
}

namespace {

double mean_daily_observations(const IndividualSeries& series) {
  if (series.observations.empty()) return 0.0;
  std::set<std::int64_t> days;
  for (const auto& obs : series.observations) {
    std::int64_t day = obs.timestamp / kMinutesPerDay;
    if (obs.timestamp < 0 && obs.timestamp % kMinutesPerDay != 0) --day;
    days.insert(day);
  }
  return static_cast<double>(series.observations.size()) / static_cast<double>(days.size());
}

}  // namespace

FilterResult filter_individuals(const Study& labeled, const FilterParams& params) {
  if (params.min_daily_obs < 0 || params.train_frac <= 0 || params.train_frac >= 1) {
    throw ConfigError("filter_individuals: invalid thresholds");
  }
  FilterResult result;
  result.study.schema = labeled.schema;
  result.study.metadata = labeled.metadata;

  for (const auto& series : labeled.individuals) {
    Exclusion entry;
    entry.individual_id = series.individual_id;
    entry.daily_obs = mean_daily_observations(series);
    entry.total_rows = series.observations.size();

    const std::size_t train_n = split_point(entry.total_rows, params.train_frac);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < train_n; ++i) {
      pos += series.observations[i].outcome.value_or(0) == 1 ? 1 : 0;
    }
    entry.minority_train = std::min(pos, train_n - pos);

    if (entry.daily_obs < params.min_daily_obs) entry.reasons.push_back("daily_obs");
    if (entry.total_rows < params.min_total_rows) entry.reasons.push_back("total_rows");
    if (entry.minority_train < params.min_minority) entry.reasons.push_back("minority");

    if (entry.reasons.empty()) {
      result.study.individuals.push_back(series);
    } else {
      result.exclusions.push_back(std::move(entry));
    }
  }
  return result;
}

std::size_t split_point(std::size_t n, double frac) {
  // 1e-9 absorbs cases like 50 * 0.7 landing just below the integer.
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * frac + 1e-9));
}

std::optional<SplitPair> sequential_split(const SupervisedSet& set, double train_frac) {
  if (train_frac <= 0.0 || train_frac >= 1.0) {
    throw ConfigError("sequential_split: train_frac must be in (0, 1)");
  }
  const std::size_t n = set.n_rows();
  if (n < 2) return std::nullopt;
  const std::size_t cut = split_point(n, train_frac);
  if (cut == 0 || cut == n) return std::nullopt;

  SplitPair out;
  out.train.n_cols = set.n_cols;
  out.test.n_cols = set.n_cols;
  for (std::size_t r = 0; r < n; ++r) {
    auto& side = r < cut ? out.train : out.test;
    side.append_row(set.row(r), set.labels[r], set.row_timestamps[r], set.row_individual[r]);
  }
  return out;
}

SupervisedSet pool_training_sets(
    const std::vector<std::pair<std::string, const SupervisedSet*>>& sets) {
  SupervisedSet pooled;
  std::string first_id;
  for (const auto& [id, set] : sets) {
    if (pooled.n_cols == 0 && set->n_rows() > 0) {
      pooled.n_cols = set->n_cols;
      first_id = id;
    } else if (set->n_rows() > 0 && set->n_cols != pooled.n_cols) {
      throw DataError("pool_training_sets: schema mismatch between '" + first_id + "' and '" +
                      id + "'");
    }
    for (std::size_t r = 0; r < set->n_rows(); ++r) {
      pooled.append_row(set->row(r), set->labels[r], set->row_timestamps[r], id);
    }
  }
  return pooled;
}

}  // namespace emakit
