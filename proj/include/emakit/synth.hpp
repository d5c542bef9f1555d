#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emakit/rng.hpp"
#include "emakit/types.hpp"

namespace emakit {

// Latent label mechanism: additive main effects on standardized levels plus
// weighted pairwise products, thresholded at the class-ratio quantile.
struct GroundTruthSpec {
  int n_main_effects = 5;
  int n_interactions = 3;
  double interaction_weight = 1.0;
  double coefficient_jitter = 0.25;  // relative per-individual jitter
};

struct SynthConfig {
  int n_individuals = 20;
  int n_features = 25;
  int n_samples = 50;
  double positive_frac = 0.7;
  double label_noise_frac = 0.2;
  double feature_noise_frac = 0.2;
  double categorical_frac = 0.2;
  int ordinal_levels = 6;
  GroundTruthSpec ground_truth;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

// Which features carry signal; recorded in Study metadata for diagnostics.
struct GroundTruthLayout {
  std::vector<int> main_features;
  std::vector<double> main_coefs;
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> pair_coefs;
  std::vector<int> categorical_features;
};

struct DiscretizeResult {
  std::vector<int> indices;
  std::vector<double> edges;  // levels - 1 interior edges; empty when degenerate
  bool degenerate = false;
};

// Equal-width bins over [min, max]; the maximum maps to the top level.
DiscretizeResult discretize_equiwidth(std::span<const double> values, int levels);

// Positive labels are the ceil(n * positive_frac) largest latent scores,
// ties broken by row index, so the pre-noise ratio is exact.
std::vector<int> assign_labels(std::span<const double> latent_scores, double positive_frac);

struct LabelNoiseResult {
  std::vector<int> labels;
  std::vector<std::size_t> touched;  // positions re-drawn as Bernoulli(positive_frac)
};

LabelNoiseResult apply_label_noise(const std::vector<int>& labels, double frac,
                                   double positive_frac, Rng& rng);

struct FeatureNoiseResult {
  std::vector<std::size_t> shuffled_columns;
};

// Permutes floor(frac * n_cols) uniformly chosen columns across rows,
// in place; column value multisets are preserved exactly.
FeatureNoiseResult apply_feature_noise(std::vector<int>& features, std::size_t n_rows,
                                       std::size_t n_cols, double frac, Rng& rng);

// Deterministic multi-individual study per the config; identical configs
// (including seed) produce identical studies. Per-individual generation is
// seeded independently and may run in parallel.
Study generate_study(const SynthConfig& config);

GroundTruthLayout layout_from_metadata(const Study& study);

}  // namespace emakit
