#include "emakit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "emakit/errors.hpp"
#include "emakit/timeutil.hpp"

namespace emakit {

namespace {

constexpr int kPointsPerDay = 6;
constexpr int kDayStartHour = 9;
constexpr Minutes kPointSpacing = 120;  // survey grid, 2h apart within the day

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("SynthConfig: ") + what);
}

double standardized_level(int level, int levels) {
  if (levels <= 1) return 0.0;
  const double half = 0.5 * static_cast<double>(levels - 1);
  return (static_cast<double>(level) - half) / half;  // in [-1, 1]
}

}  // namespace

void SynthConfig::validate() const {
  require(n_individuals >= 1, "n_individuals must be >= 1");
  require(n_features >= 1, "n_features must be >= 1");
  require(n_samples >= 1, "n_samples must be >= 1");
  require(positive_frac > 0.0 && positive_frac < 1.0, "positive_frac must be in (0, 1)");
  require(label_noise_frac >= 0.0 && label_noise_frac <= 1.0, "label_noise_frac outside [0, 1]");
  require(feature_noise_frac >= 0.0 && feature_noise_frac <= 1.0,
          "feature_noise_frac outside [0, 1]");
  require(categorical_frac >= 0.0 && categorical_frac <= 1.0, "categorical_frac outside [0, 1]");
  require(ordinal_levels >= 2 && ordinal_levels <= kMaxOrdinalLevels, "ordinal_levels outside range");
  require(ground_truth.n_main_effects >= 0, "n_main_effects must be >= 0");
  require(ground_truth.n_interactions >= 0, "n_interactions must be >= 0");
  require(ground_truth.interaction_weight >= 0.0, "interaction_weight must be >= 0");
  require(ground_truth.coefficient_jitter >= 0.0, "coefficient_jitter must be >= 0");
  require(ground_truth.n_main_effects + 2 * ground_truth.n_interactions <= n_features,
          "ground truth uses more features than available");
}

DiscretizeResult discretize_equiwidth(std::span<const double> values, int levels) {
  if (levels < 2) throw ConfigError("discretize_equiwidth: levels must be >= 2");
  if (values.empty()) throw ConfigError("discretize_equiwidth: empty input");

  DiscretizeResult result;
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it;
  const double hi = *max_it;
  if (lo == hi) {
    result.degenerate = true;
    result.indices.assign(values.size(), 0);
    return result;
  }
  const double width = (hi - lo) / static_cast<double>(levels);
  result.indices.reserve(values.size());
  for (double v : values) {
    int idx = static_cast<int>(std::floor((v - lo) / width));
    idx = std::clamp(idx, 0, levels - 1);
    result.indices.push_back(idx);
  }
  result.edges.reserve(static_cast<std::size_t>(levels - 1));
  for (int b = 1; b < levels; ++b) {
    result.edges.push_back(lo + width * static_cast<double>(b));
  }
  return result;
}

std::vector<int> assign_labels(std::span<const double> latent_scores, double positive_frac) {
  if (positive_frac <= 0.0 || positive_frac >= 1.0) {
    throw ConfigError("assign_labels: positive_frac must be in (0, 1)");
  }
  const std::size_t n = latent_scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (latent_scores[a] != latent_scores[b]) return latent_scores[a] > latent_scores[b];
    return a < b;
  });
  const auto n_pos =
      static_cast<std::size_t>(std::ceil(static_cast<double>(n) * positive_frac - 1e-9));
  std::vector<int> labels(n, 0);
  for (std::size_t i = 0; i < n_pos && i < n; ++i) labels[order[i]] = 1;
  return labels;
}

LabelNoiseResult apply_label_noise(const std::vector<int>& labels, double frac,
                                   double positive_frac, Rng& rng) {
  if (frac < 0.0 || frac > 1.0) throw ConfigError("apply_label_noise: frac outside [0, 1]");
  LabelNoiseResult result;
  result.labels = labels;
  const auto n_touch =
      static_cast<std::size_t>(std::floor(static_cast<double>(labels.size()) * frac + 1e-9));
  result.touched = sample_without_replacement(labels.size(), n_touch, rng);
  for (std::size_t pos : result.touched) {
    result.labels[pos] = rng.next_bernoulli(positive_frac);
  }
  return result;
}

FeatureNoiseResult apply_feature_noise(std::vector<int>& features, std::size_t n_rows,
                                       std::size_t n_cols, double frac, Rng& rng) {
  if (frac < 0.0 || frac > 1.0) throw ConfigError("apply_feature_noise: frac outside [0, 1]");
  if (features.size() != n_rows * n_cols) throw ConfigError("apply_feature_noise: bad matrix");
  FeatureNoiseResult result;
  const auto n_shuffle =
      static_cast<std::size_t>(std::floor(static_cast<double>(n_cols) * frac + 1e-9));
  result.shuffled_columns = sample_without_replacement(n_cols, n_shuffle, rng);
  for (std::size_t col : result.shuffled_columns) {
    // Fisher-Yates on the column, touching only this column's cells.
    for (std::size_t i = n_rows; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
      std::swap(features[(i - 1) * n_cols + col], features[j * n_cols + col]);
    }
  }
  return result;
}

namespace {

struct StudyPlan {
  std::vector<bool> is_categorical;
  GroundTruthLayout layout;
};

StudyPlan plan_study(const SynthConfig& cfg, Rng& rng) {
  StudyPlan plan;
  plan.is_categorical.assign(static_cast<std::size_t>(cfg.n_features), false);
  const auto n_cat = static_cast<std::size_t>(
      std::floor(static_cast<double>(cfg.n_features) * cfg.categorical_frac + 1e-9));
  for (std::size_t col : sample_without_replacement(cfg.n_features, n_cat, rng)) {
    plan.is_categorical[col] = true;
    plan.layout.categorical_features.push_back(static_cast<int>(col));
  }
  std::sort(plan.layout.categorical_features.begin(), plan.layout.categorical_features.end());

  const int needed = cfg.ground_truth.n_main_effects + 2 * cfg.ground_truth.n_interactions;
  const auto chosen =
      sample_without_replacement(cfg.n_features, static_cast<std::size_t>(needed), rng);
  std::size_t cursor = 0;
  for (int m = 0; m < cfg.ground_truth.n_main_effects; ++m) {
    plan.layout.main_features.push_back(static_cast<int>(chosen[cursor++]));
    const double magnitude = rng.next_uniform(0.75, 1.25);
    plan.layout.main_coefs.push_back(rng.next_bernoulli(0.5) ? magnitude : -magnitude);
  }
  for (int p = 0; p < cfg.ground_truth.n_interactions; ++p) {
    const int a = static_cast<int>(chosen[cursor++]);
    const int b = static_cast<int>(chosen[cursor++]);
    plan.layout.pairs.emplace_back(std::min(a, b), std::max(a, b));
    const double magnitude = rng.next_uniform(0.75, 1.25);
    plan.layout.pair_coefs.push_back(rng.next_bernoulli(0.5) ? magnitude : -magnitude);
  }
  return plan;
}

IndividualSeries generate_individual(const SynthConfig& cfg, const StudyPlan& plan, int index,
                                     Rng rng) {
  const auto n = static_cast<std::size_t>(cfg.n_samples);
  const auto d = static_cast<std::size_t>(cfg.n_features);

  // Each feature column has its own normal distribution for this individual.
  std::vector<double> raw(n * d);
  for (std::size_t f = 0; f < d; ++f) {
    const double mu = rng.next_uniform(-3.0, 3.0);
    const double sigma = rng.next_uniform(0.5, 2.0);
    for (std::size_t r = 0; r < n; ++r) {
      raw[r * d + f] = mu + sigma * rng.next_normal();
    }
  }

  std::vector<int> levels(n * d, 0);
  std::vector<double> column(n);
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t r = 0; r < n; ++r) column[r] = raw[r * d + f];
    if (plan.is_categorical[f]) {
      // Binary encoding split at the median.
      std::vector<double> sorted = column;
      std::sort(sorted.begin(), sorted.end());
      const double median = 0.5 * (sorted[(n - 1) / 2] + sorted[n / 2]);
      for (std::size_t r = 0; r < n; ++r) levels[r * d + f] = column[r] > median ? 1 : 0;
    } else {
      const DiscretizeResult disc = discretize_equiwidth(column, cfg.ordinal_levels);
      for (std::size_t r = 0; r < n; ++r) levels[r * d + f] = disc.indices[r];
    }
  }

  // Per-individual jittered coefficients on the shared mechanism.
  const auto& layout = plan.layout;
  std::vector<double> main_coefs = layout.main_coefs;
  std::vector<double> pair_coefs = layout.pair_coefs;
  for (double& c : main_coefs) c *= 1.0 + cfg.ground_truth.coefficient_jitter * rng.next_normal();
  for (double& c : pair_coefs) c *= 1.0 + cfg.ground_truth.coefficient_jitter * rng.next_normal();

  std::vector<double> latent(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double score = 0.0;
    for (std::size_t m = 0; m < layout.main_features.size(); ++m) {
      const auto f = static_cast<std::size_t>(layout.main_features[m]);
      const int level_count = plan.is_categorical[f] ? 2 : cfg.ordinal_levels;
      score += main_coefs[m] * standardized_level(levels[r * d + f], level_count);
    }
    for (std::size_t p = 0; p < layout.pairs.size(); ++p) {
      const auto a = static_cast<std::size_t>(layout.pairs[p].first);
      const auto b = static_cast<std::size_t>(layout.pairs[p].second);
      const int la = plan.is_categorical[a] ? 2 : cfg.ordinal_levels;
      const int lb = plan.is_categorical[b] ? 2 : cfg.ordinal_levels;
      score += cfg.ground_truth.interaction_weight * pair_coefs[p] *
               standardized_level(levels[r * d + a], la) *
               standardized_level(levels[r * d + b], lb);
    }
    latent[r] = score;
  }

  std::vector<int> labels = assign_labels(latent, cfg.positive_frac);
  labels = apply_label_noise(labels, cfg.label_noise_frac, cfg.positive_frac, rng).labels;
  apply_feature_noise(levels, n, d, cfg.feature_noise_frac, rng);

  IndividualSeries series;
  char id[16];
  std::snprintf(id, sizeof(id), "p%03d", index + 1);
  series.individual_id = id;
  series.observations.reserve(n);
  const Minutes day0 = make_minutes(2024, 1, 1, kDayStartHour, 0);
  for (std::size_t r = 0; r < n; ++r) {
    Observation obs;
    obs.timestamp = day0 + static_cast<Minutes>(r / kPointsPerDay) * kMinutesPerDay +
                    static_cast<Minutes>(r % kPointsPerDay) * kPointSpacing;
    obs.features.assign(levels.begin() + static_cast<std::ptrdiff_t>(r * d),
                        levels.begin() + static_cast<std::ptrdiff_t>((r + 1) * d));
    obs.outcome = labels[r];
    obs.raw_outcome = labels[r] ? "1" : "0";
    series.observations.push_back(std::move(obs));
  }
  return series;
}

nlohmann::json layout_to_json(const GroundTruthLayout& layout) {
  nlohmann::json j;
  j["main_features"] = layout.main_features;
  j["main_coefs"] = layout.main_coefs;
  j["pairs"] = nlohmann::json::array();
  for (const auto& [a, b] : layout.pairs) j["pairs"].push_back({a, b});
  j["pair_coefs"] = layout.pair_coefs;
  j["categorical_features"] = layout.categorical_features;
  return j;
}

}  // namespace

Study generate_study(const SynthConfig& cfg) {
  cfg.validate();
  Rng study_rng(cfg.seed);
  const StudyPlan plan = plan_study(cfg, study_rng);

  Study study;
  study.schema.reserve(static_cast<std::size_t>(cfg.n_features));
  for (int f = 0; f < cfg.n_features; ++f) {
    FeatureSpec spec;
    char name[16];
    std::snprintf(name, sizeof(name), "f%02d", f);
    spec.name = name;
    if (plan.is_categorical[static_cast<std::size_t>(f)]) {
      spec.kind = FeatureKind::Categorical;
      spec.levels = 2;
    } else {
      spec.kind = FeatureKind::Ordinal;
      spec.levels = cfg.ordinal_levels;
    }
    study.schema.push_back(std::move(spec));
  }

  study.individuals.resize(static_cast<std::size_t>(cfg.n_individuals));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < cfg.n_individuals; ++i) {
    study.individuals[static_cast<std::size_t>(i)] = generate_individual(
        cfg, plan, i, Rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(i) + 1)));
  }

  study.metadata["source"] = "synthetic";
  study.metadata["seed"] = std::to_string(cfg.seed);
  study.metadata["ground_truth"] = layout_to_json(plan.layout).dump();
  return study;
}

GroundTruthLayout layout_from_metadata(const Study& study) {
  const auto it = study.metadata.find("ground_truth");
  if (it == study.metadata.end()) throw DataError("study has no ground_truth metadata");
  nlohmann::json j = nlohmann::json::parse(it->second);
  GroundTruthLayout layout;
  layout.main_features = j.at("main_features").get<std::vector<int>>();
  layout.main_coefs = j.at("main_coefs").get<std::vector<double>>();
  for (const auto& p : j.at("pairs")) {
    layout.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  }
  layout.pair_coefs = j.at("pair_coefs").get<std::vector<double>>();
  layout.categorical_features = j.at("categorical_features").get<std::vector<int>>();
  return layout;
}

}  // namespace emakit
