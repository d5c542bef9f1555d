#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "emakit/errors.hpp"
#include "emakit/metrics.hpp"
#include "emakit/synth.hpp"

using namespace emakit;

TEST_SUITE("synth") {
  TEST_CASE("uniformly spaced values hit every bin") {
    const std::vector<double> values{0.0, 1.2, 2.4, 3.6, 4.8, 6.0};
    const auto result = discretize_equiwidth(values, 6);
    CHECK(result.indices == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK_FALSE(result.degenerate);
    REQUIRE(result.edges.size() == 5);
    CHECK(result.edges[0] == doctest::Approx(1.0));
    CHECK(result.edges[4] == doctest::Approx(5.0));
  }

  TEST_CASE("constant column degenerates to one level") {
    const std::vector<double> values(10, 3.0);
    const auto result = discretize_equiwidth(values, 6);
    CHECK(result.degenerate);
    for (int idx : result.indices) CHECK(idx == 0);
  }

  TEST_CASE("normal draws populate interior bins most") {
    Rng rng(77);
    std::vector<double> values(1000);
    for (auto& v : values) v = rng.next_normal();
    const auto result = discretize_equiwidth(values, 6);
    std::vector<int> counts(6, 0);
    for (int idx : result.indices) ++counts[static_cast<std::size_t>(idx)];
    for (int c : counts) CHECK(c > 0);
    CHECK(counts[2] + counts[3] > counts[0] + counts[5]);
  }

  TEST_CASE("labels hit the exact positive count") {
    Rng rng(5);
    std::vector<double> latent(50);
    for (auto& v : latent) v = rng.next_normal();
    const auto labels = assign_labels(latent, 0.7);
    CHECK(std::count(labels.begin(), labels.end(), 1) == 35);
  }

  TEST_CASE("labels are monotone in a single main effect") {
    std::vector<double> latent;
    for (int i = 0; i < 30; ++i) latent.push_back(static_cast<double>(i % 6));
    const auto labels = assign_labels(latent, 0.5);
    double worst_pos = 7, best_neg = -1;
    for (std::size_t i = 0; i < latent.size(); ++i) {
      if (labels[i] == 1) worst_pos = std::min(worst_pos, latent[i]);
      if (labels[i] == 0) best_neg = std::max(best_neg, latent[i]);
    }
    CHECK(worst_pos >= best_neg);  // threshold behavior up to the tied level
  }

  TEST_CASE("pure XOR labels equal pair parity up to quantile ties") {
    // Cells (-1,-1) and (1,1) share the high score; the other two are low.
    std::vector<double> latent;
    std::vector<int> parity;
    for (int a = 0; a <= 1; ++a) {
      for (int b = 0; b <= 1; ++b) {
        for (int rep = 0; rep < 25; ++rep) {
          const double za = a == 0 ? -1.0 : 1.0;
          const double zb = b == 0 ? -1.0 : 1.0;
          latent.push_back(za * zb);
          parity.push_back(a == b ? 1 : 0);
        }
      }
    }
    const auto labels = assign_labels(latent, 0.5);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) agree += labels[i] == parity[i] ? 1 : 0;
    CHECK(agree == labels.size());  // balanced cells, no tie spill
  }

  TEST_CASE("label noise touches exactly the requested share") {
    Rng rng(9);
    std::vector<int> labels(100, 0);
    for (std::size_t i = 0; i < 70; ++i) labels[i] = 1;
    const auto result = apply_label_noise(labels, 0.2, 0.7, rng);
    CHECK(result.touched.size() == 20);
    // Untouched positions keep their labels.
    std::vector<bool> touched(labels.size(), false);
    for (auto pos : result.touched) touched[pos] = true;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!touched[i]) CHECK(result.labels[i] == labels[i]);
    }

    const auto identity = apply_label_noise(labels, 0.0, 0.7, rng);
    CHECK(identity.labels == labels);
    CHECK(identity.touched.empty());
  }

  TEST_CASE("full label noise redraws the marginal") {
    Rng rng(17);
    std::vector<int> labels(1000, 0);
    const auto result = apply_label_noise(labels, 1.0, 0.7, rng);
    CHECK(result.touched.size() == 1000);
    const auto positives = std::count(result.labels.begin(), result.labels.end(), 1);
    CHECK(positives >= 657);  // 700 +- 3 * sqrt(1000 * 0.21)
    CHECK(positives <= 743);
  }

  TEST_CASE("feature noise shuffles exactly the requested columns") {
    Rng rng(23);
    const std::size_t n_rows = 40, n_cols = 25;
    std::vector<int> matrix(n_rows * n_cols);
    for (std::size_t i = 0; i < matrix.size(); ++i) matrix[i] = static_cast<int>(i % 6);
    const auto original = matrix;
    const auto result = apply_feature_noise(matrix, n_rows, n_cols, 0.2, rng);
    CHECK(result.shuffled_columns.size() == 5);

    std::vector<bool> shuffled(n_cols, false);
    for (auto c : result.shuffled_columns) shuffled[c] = true;
    for (std::size_t c = 0; c < n_cols; ++c) {
      std::vector<int> before, after;
      for (std::size_t r = 0; r < n_rows; ++r) {
        before.push_back(original[r * n_cols + c]);
        after.push_back(matrix[r * n_cols + c]);
      }
      if (!shuffled[c]) {
        CHECK(after == before);
      } else {
        auto sb = before, sa = after;
        std::sort(sb.begin(), sb.end());
        std::sort(sa.begin(), sa.end());
        CHECK(sa == sb);  // multiset preserved
      }
    }
  }

  TEST_CASE("generated study has the configured shape") {
    SynthConfig cfg;
    cfg.n_individuals = 20;
    cfg.n_features = 25;
    cfg.n_samples = 50;
    cfg.seed = 31;
    const Study study = generate_study(cfg);
    study.validate();
    REQUIRE(study.individuals.size() == 20);
    REQUIRE(study.schema.size() == 25);
    int n_categorical = 0;
    for (const auto& spec : study.schema) {
      n_categorical += spec.kind == FeatureKind::Categorical ? 1 : 0;
    }
    CHECK(n_categorical == 5);  // 20% of 25
    for (const auto& series : study.individuals) {
      REQUIRE(series.observations.size() == 50);
      for (const auto& obs : series.observations) {
        REQUIRE(obs.outcome.has_value());
        for (std::size_t f = 0; f < obs.features.size(); ++f) {
          CHECK(obs.features[f] >= 0);
          CHECK(obs.features[f] < study.schema[f].levels);
        }
      }
    }
  }

  TEST_CASE("same seed, same study") {
    SynthConfig cfg;
    cfg.n_individuals = 5;
    cfg.n_features = 8;
    cfg.n_samples = 30;
    cfg.ground_truth.n_main_effects = 3;
    cfg.ground_truth.n_interactions = 1;
    cfg.seed = 99;
    const Study a = generate_study(cfg);
    const Study b = generate_study(cfg);
    REQUIRE(a.individuals.size() == b.individuals.size());
    for (std::size_t i = 0; i < a.individuals.size(); ++i) {
      const auto& oa = a.individuals[i].observations;
      const auto& ob = b.individuals[i].observations;
      REQUIRE(oa.size() == ob.size());
      for (std::size_t r = 0; r < oa.size(); ++r) {
        CHECK(oa[r].timestamp == ob[r].timestamp);
        CHECK(oa[r].features == ob[r].features);
        CHECK(oa[r].outcome == ob[r].outcome);
      }
    }
    CHECK(a.metadata.at("ground_truth") == b.metadata.at("ground_truth"));
  }

  TEST_CASE("categorical_frac zero keeps every feature ordinal") {
    SynthConfig cfg;
    cfg.n_individuals = 2;
    cfg.n_features = 10;
    cfg.n_samples = 40;
    cfg.categorical_frac = 0.0;
    cfg.ground_truth.n_main_effects = 4;
    cfg.ground_truth.n_interactions = 2;
    cfg.seed = 3;
    const Study study = generate_study(cfg);
    for (const auto& spec : study.schema) {
      CHECK(spec.kind == FeatureKind::Ordinal);
      CHECK(spec.levels == 6);
    }
  }

  TEST_CASE("pre-noise ratio is exact and a lone main effect is learnable") {
    // The class threshold generally lands inside one ordinal level of the
    // driving feature, and every sample there is a tie for a single-feature
    // ranker. At the default 6 levels the central equi-width bins of a
    // normal are wide enough that this tie mass alone can cost ~0.07 AUC,
    // so the >= 0.95 learnability guard is checked at finer binning and a
    // looser floor documents the 6-level behavior.
    for (const int levels : {6, 12}) {
      SynthConfig cfg;
      cfg.n_individuals = 3;
      cfg.n_features = 5;
      cfg.n_samples = 1000;
      cfg.label_noise_frac = 0.0;
      cfg.feature_noise_frac = 0.0;
      cfg.categorical_frac = 0.0;
      cfg.ordinal_levels = levels;
      cfg.ground_truth.n_main_effects = 1;
      cfg.ground_truth.n_interactions = 0;
      cfg.ground_truth.coefficient_jitter = 0.0;
      cfg.seed = 513;
      const Study study = generate_study(cfg);
      const auto layout = layout_from_metadata(study);
      REQUIRE(layout.main_features.size() == 1);
      const auto f = static_cast<std::size_t>(layout.main_features[0]);
      const double direction = layout.main_coefs[0] >= 0 ? 1.0 : -1.0;

      for (const auto& series : study.individuals) {
        std::size_t positives = 0;
        std::vector<int> labels;
        std::vector<double> scores;
        for (const auto& obs : series.observations) {
          positives += *obs.outcome == 1 ? 1 : 0;
          labels.push_back(*obs.outcome);
          scores.push_back(direction * static_cast<double>(obs.features[f]));
        }
        CHECK(positives == 700);  // ceil(0.7 * 1000), exact before noise
        CHECK(*roc_auc(labels, scores) >= (levels >= 12 ? 0.95 : 0.88));
      }
    }
  }

  TEST_CASE("invalid configs are rejected") {
    SynthConfig cfg;
    cfg.positive_frac = 1.2;
    CHECK_THROWS_AS(generate_study(cfg), ConfigError);
    cfg = SynthConfig{};
    cfg.n_features = 5;
    cfg.ground_truth.n_main_effects = 4;
    cfg.ground_truth.n_interactions = 1;  // 4 + 2 > 5
    CHECK_THROWS_AS(generate_study(cfg), ConfigError);
  }
}
