#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "emakit/ebm.hpp"
#include "emakit/errors.hpp"
#include "emakit/model_io.hpp"
#include "emakit/metrics.hpp"
#include "emakit/rng.hpp"

using namespace emakit;

namespace {

SchemaView make_schema(const std::vector<int>& levels, const std::vector<bool>& categorical = {}) {
  std::vector<FeatureSpec> specs;
  for (std::size_t f = 0; f < levels.size(); ++f) {
    FeatureSpec spec;
    spec.name = "f" + std::to_string(f);
    spec.levels = levels[f];
    spec.kind = !categorical.empty() && categorical[f] ? FeatureKind::Categorical
                                                       : FeatureKind::Ordinal;
    specs.push_back(std::move(spec));
  }
  return SchemaView::from(specs);
}

SupervisedSet xor_set(int per_cell) {
  SupervisedSet set;
  Minutes t = 0;
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 1; ++b) {
      for (int rep = 0; rep < per_cell; ++rep) {
        set.append_row(std::vector<int>{a, b}, a == b ? 1 : 0, t++, "p");
      }
    }
  }
  return set;
}

SupervisedSet random_set(Rng& rng, std::size_t n, const std::vector<int>& levels, double rate) {
  SupervisedSet set;
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<int> row(levels.size());
    for (std::size_t f = 0; f < levels.size(); ++f) {
      row[f] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(levels[f])));
    }
    set.append_row(row, rng.next_bernoulli(rate), static_cast<Minutes>(r), "p");
  }
  return set;
}

// Training-distribution weighted mean of a term, for the centering check.
double weighted_term_mean(const SupervisedSet& train, std::size_t feature,
                          const std::vector<double>& term) {
  std::vector<double> weight(term.size(), 0.0);
  for (std::size_t r = 0; r < train.n_rows(); ++r) {
    weight[static_cast<std::size_t>(train.at(r, feature))] += 1.0;
  }
  double mean = 0.0;
  for (std::size_t l = 0; l < term.size(); ++l) mean += weight[l] * term[l];
  return mean / static_cast<double>(train.n_rows());
}

}  // namespace

TEST_SUITE("ebm") {
  TEST_CASE("a perfectly predictive binary feature separates training data") {
    SupervisedSet set;
    for (int i = 0; i < 60; ++i) {
      const int v = i % 2;
      set.append_row(std::vector<int>{v, static_cast<int>((i / 2) % 3)}, v, i, "p");
    }
    EbmConfig cfg;
    cfg.n_rounds = 80;
    cfg.validation_frac = 0.0;
    const auto schema = make_schema({2, 3});
    const EbmModel model = fit_ebm(set, schema, cfg);
    const auto auc = roc_auc(set.labels, predict_scores(model, set));
    CHECK(*auc == doctest::Approx(1.0));
    CHECK(model.main_terms[0][1] > model.main_terms[0][0]);
  }

  TEST_CASE("constant labels yield a flagged intercept-only model") {
    SupervisedSet set;
    for (int i = 0; i < 20; ++i) set.append_row(std::vector<int>{i % 4}, 1, i, "p");
    EbmConfig cfg;
    cfg.validation_frac = 0.0;
    const EbmModel model = fit_ebm(set, make_schema({4}), cfg);
    CHECK(model.degenerate_target);
    const double first = predict_score(model, std::vector<int>{0});
    for (int l = 1; l < 4; ++l) {
      CHECK(predict_score(model, std::vector<int>{l}) == doctest::Approx(first));
    }
    CHECK(predict_proba(model, std::vector<int>{0}) > 0.99);
    double importance_sum = 0.0;
    for (double v : model.main_importance) importance_sum += v;
    CHECK(importance_sum == doctest::Approx(0.0));
  }

  TEST_CASE("empty training set is a hard error") {
    SupervisedSet set;
    set.n_cols = 1;
    EbmConfig cfg;
    CHECK_THROWS_AS(fit_ebm(set, make_schema({2}), cfg), DataError);
  }

  TEST_CASE("xor needs an interaction term") {
    const SupervisedSet set = xor_set(25);
    const auto schema = make_schema({2, 2}, {true, true});

    EbmConfig with_pair;
    with_pair.n_rounds = 60;
    with_pair.interaction_rounds = 60;
    with_pair.n_interactions = 1;
    with_pair.validation_frac = 0.0;
    const EbmModel strong = fit_ebm(set, schema, with_pair);
    CHECK(*roc_auc(set.labels, predict_scores(strong, set)) >= 0.95);

    EbmConfig mains_only = with_pair;
    mains_only.n_interactions = 0;
    const EbmModel weak = fit_ebm(set, schema, mains_only);
    CHECK(*roc_auc(set.labels, predict_scores(weak, set)) <= 0.6);
  }

  TEST_CASE("hand-built lookup tables evaluate directly") {
    EbmModel model;
    model.link = LinkKind::Logistic;
    model.intercept = 0.0;
    model.main_terms = {{-1.0, 1.0}};
    model.main_importance = {1.0};
    model.feature_names = {"f0"};
    CHECK(predict_score(model, std::vector<int>{0}) == doctest::Approx(-1.0));
    CHECK(predict_score(model, std::vector<int>{1}) == doctest::Approx(1.0));

    // Logistic evaluations.
    model.main_terms = {{0.0, 0.0}};
    CHECK(predict_proba(model, std::vector<int>{0}) == doctest::Approx(0.5));
    model.intercept = 2.0;
    CHECK(predict_proba(model, std::vector<int>{0}) == doctest::Approx(0.8808).epsilon(1e-3));
    model.intercept = -2.0;
    CHECK(predict_proba(model, std::vector<int>{0}) ==
          doctest::Approx(1.0 - 0.8807970779778823).epsilon(1e-6));
  }

  TEST_CASE("changing one unpaired feature shifts the score by the table delta") {
    Rng rng(61);
    const std::vector<int> levels{4, 3, 5};
    const SupervisedSet set = random_set(rng, 120, levels, 0.5);
    EbmConfig cfg;
    cfg.n_rounds = 40;
    cfg.validation_frac = 0.0;
    const EbmModel model = fit_ebm(set, make_schema(levels), cfg);
    const std::vector<int> base{1, 2, 3};
    std::vector<int> changed = base;
    changed[1] = 0;
    const double delta = predict_score(model, changed) - predict_score(model, base);
    CHECK(delta == doctest::Approx(model.main_terms[1][0] - model.main_terms[1][2]));
  }

  TEST_CASE("out-of-range levels raise schema errors naming the feature") {
    Rng rng(62);
    const SupervisedSet set = random_set(rng, 50, {3, 3}, 0.5);
    EbmConfig cfg;
    cfg.n_rounds = 5;
    cfg.validation_frac = 0.0;
    const EbmModel model = fit_ebm(set, make_schema({3, 3}), cfg);
    try {
      predict_score(model, std::vector<int>{1, 3});
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(std::string(e.what()).find("f1") != std::string::npos);
    }
    CHECK_THROWS_AS(predict_score(model, std::vector<int>{1}), SchemaError);
  }

  TEST_CASE("identity-link models refuse predict_proba") {
    EbmModel model;
    model.link = LinkKind::Identity;
    model.main_terms = {{0.0, 0.0}};
    CHECK_THROWS_AS(predict_proba(model, std::vector<int>{0}), ConfigError);
  }

  TEST_CASE("training loss never increases without validation") {
    Rng rng(63);
    for (int trial = 0; trial < 6; ++trial) {
      const std::vector<int> levels{6, 6, 4, 2};
      const SupervisedSet set = random_set(rng, 80 + 40 * trial, levels, 0.4);
      EbmConfig cfg;
      cfg.n_rounds = 50;
      cfg.interaction_rounds = 25;
      cfg.n_interactions = 2;
      cfg.validation_frac = 0.0;
      cfg.link = trial % 2 == 0 ? LinkKind::Logistic : LinkKind::Identity;
      const EbmModel model = fit_ebm(set, make_schema(levels), cfg);
      for (std::size_t i = 1; i < model.train_loss_trace.size(); ++i) {
        CHECK(model.train_loss_trace[i] <= model.train_loss_trace[i - 1] + 1e-12);
      }
    }
  }

  TEST_CASE("terms are mean-centered under the training distribution") {
    Rng rng(64);
    const std::vector<int> levels{6, 5, 3, 2};
    const SupervisedSet set = random_set(rng, 200, levels, 0.35);
    EbmConfig cfg;
    cfg.n_rounds = 60;
    cfg.interaction_rounds = 30;
    cfg.n_interactions = 3;
    cfg.validation_frac = 0.0;
    const EbmModel model = fit_ebm(set, make_schema(levels), cfg);
    for (std::size_t f = 0; f < levels.size(); ++f) {
      CHECK(std::abs(weighted_term_mean(set, f, model.main_terms[f])) < 1e-9);
    }
    for (const auto& pair : model.pair_terms) {
      double mean = 0.0;
      for (std::size_t r = 0; r < set.n_rows(); ++r) {
        mean += pair.at(set.at(r, static_cast<std::size_t>(pair.feature_i)),
                        set.at(r, static_cast<std::size_t>(pair.feature_j)));
      }
      CHECK(std::abs(mean / static_cast<double>(set.n_rows())) < 1e-9);
    }
  }

  TEST_CASE("identical inputs produce identical models") {
    Rng rng(65);
    const std::vector<int> levels{6, 6, 3};
    const SupervisedSet set = random_set(rng, 150, levels, 0.5);
    EbmConfig cfg;
    cfg.n_rounds = 40;
    cfg.n_interactions = 2;
    cfg.interaction_rounds = 20;
    const auto schema = make_schema(levels);
    const EbmModel a = fit_ebm(set, schema, cfg);
    const EbmModel b = fit_ebm(set, schema, cfg);
    CHECK(ebm_to_json(a).dump() == ebm_to_json(b).dump());
  }

  TEST_CASE("one identity micro-step matches the analytic loss drop") {
    // Single 3-level feature, leaves = levels, unique best partition.
    SupervisedSet set;
    const double level_values[3] = {0.1, 0.55, 0.9};
    int t = 0;
    for (int l = 0; l < 3; ++l) {
      for (int rep = 0; rep < 10; ++rep) {
        set.append_row(std::vector<int>{l}, level_values[l] > 0.5 ? 1 : 0, t++, "p");
      }
    }
    // Real-valued targets through the regression entry point.
    std::vector<double> targets;
    for (int l = 0; l < 3; ++l) {
      for (int rep = 0; rep < 10; ++rep) {
        targets.push_back(level_values[l] + 0.01 * rep);  // distinct leaf means
      }
    }
    EbmConfig cfg;
    cfg.link = LinkKind::Identity;
    cfg.n_rounds = 1;
    cfg.max_leaves = 3;
    cfg.validation_frac = 0.0;
    const auto schema = make_schema({3});

    double target_mean = 0.0;
    for (double y : targets) target_mean += y;
    target_mean /= static_cast<double>(targets.size());

    double sse_before = 0.0;
    double analytic_drop = 0.0;
    for (int l = 0; l < 3; ++l) {
      double leaf_sum = 0.0;
      for (int rep = 0; rep < 10; ++rep) {
        const double r = targets[static_cast<std::size_t>(l * 10 + rep)] - target_mean;
        sse_before += r * r;
        leaf_sum += r;
      }
      const double leaf_mean = leaf_sum / 10.0;
      analytic_drop += cfg.learning_rate * (2.0 - cfg.learning_rate) * 10.0 * leaf_mean * leaf_mean;
    }

    const EbmModel model = fit_ebm_regression(set.features, set.n_rows(), schema, targets, cfg);
    double sse_after = 0.0;
    for (std::size_t r = 0; r < set.n_rows(); ++r) {
      const double e = targets[r] - predict_score(model, set.row(r));
      sse_after += e * e;
    }
    const double drop = sse_before - sse_after;
    CHECK(drop == doctest::Approx(analytic_drop).epsilon(0.10));
  }

  TEST_CASE("model documents round-trip exactly") {
    Rng rng(66);
    const std::vector<int> levels{6, 4, 2};
    const SupervisedSet set = random_set(rng, 120, levels, 0.45);
    EbmConfig cfg;
    cfg.n_rounds = 30;
    cfg.n_interactions = 2;
    cfg.interaction_rounds = 15;
    const auto schema = make_schema(levels);
    const EbmModel model = fit_ebm(set, schema, cfg);

    const auto doc = ebm_to_json(model);
    const EbmModel back = ebm_from_json(doc);
    for (int i = 0; i < 100; ++i) {
      std::vector<int> row(levels.size());
      for (std::size_t f = 0; f < levels.size(); ++f) {
        row[f] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(levels[f])));
      }
      CHECK(predict_score(model, row) == predict_score(back, row));
    }
    CHECK(ebm_to_json(back).dump() == doc.dump());
  }

  TEST_CASE("corrupted and versioned documents are rejected") {
    const auto dir = std::filesystem::temp_directory_path() / "emakit_model_test";
    std::filesystem::create_directories(dir);
    Rng rng(67);
    const SupervisedSet set = random_set(rng, 40, {3}, 0.5);
    EbmConfig cfg;
    cfg.n_rounds = 5;
    cfg.validation_frac = 0.0;
    const EbmModel model = fit_ebm(set, make_schema({3}), cfg);

    const auto path = (dir / "model.json").string();
    save_model_file(ebm_to_json(model), path);
    CHECK_NOTHROW(ebm_from_json(load_model_file(path)));

    {
      std::ifstream in(path);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      std::ofstream out(path);
      out << text.substr(0, text.size() / 2);  // truncate
    }
    CHECK_THROWS_AS(load_model_file(path), DataError);

    auto doc = ebm_to_json(model);
    doc["format_version"] = kModelFormatVersion + 1;
    save_model_file(doc, path);
    CHECK_THROWS_AS(load_model_file(path), DataError);
  }

  TEST_CASE("shape export is monotone for a graded main effect") {
    SupervisedSet set;
    int t = 0;
    for (int l = 0; l < 6; ++l) {
      for (int rep = 0; rep < 20; ++rep) {
        set.append_row(std::vector<int>{l}, rep < l * 4 ? 1 : 0, t++, "p");  // rate = l/5
      }
    }
    EbmConfig cfg;
    cfg.n_rounds = 120;
    cfg.validation_frac = 0.0;
    const EbmModel model = fit_ebm(set, make_schema({6}), cfg);
    const ShapeFunctions shapes = extract_shape_functions(model);
    REQUIRE(shapes.main_tables.size() == 1);
    for (std::size_t l = 1; l < 6; ++l) {
      CHECK(shapes.main_tables[0][l] >= shapes.main_tables[0][l - 1] - 1e-6);
    }
    CHECK(shapes.main_importance[0] > 0.0);
  }

  TEST_CASE("early stopping rolls back to the best holdout round") {
    Rng rng(68);
    // Signal in the first feature, pure noise labels near the end so the
    // holdout exists; validation keeps the model small.
    SupervisedSet set;
    for (int i = 0; i < 200; ++i) {
      const int level = static_cast<int>(rng.next_below(6));
      const int label = rng.next_unit() < (level >= 3 ? 0.9 : 0.1) ? 1 : 0;
      set.append_row(std::vector<int>{level}, label, i, "p");
    }
    EbmConfig cfg;
    cfg.n_rounds = 400;
    cfg.validation_frac = 0.2;
    cfg.early_stop_patience = 20;
    const EbmModel model = fit_ebm(set, make_schema({6}), cfg);
    CHECK(model.rounds_used >= 1);
    CHECK(model.rounds_used <= 400);
    CHECK(model.train_loss_trace.size() <= 400);
  }

  TEST_CASE("regression fit with zero rounds returns the target mean") {
    SupervisedSet set;
    std::vector<double> targets{0.2, 0.4, 0.6, 0.8};
    for (int i = 0; i < 4; ++i) set.append_row(std::vector<int>{i % 2}, 0, i, "p");
    EbmConfig cfg;
    cfg.link = LinkKind::Identity;
    cfg.n_rounds = 0;
    cfg.validation_frac = 0.0;
    const EbmModel model =
        fit_ebm_regression(set.features, set.n_rows(), make_schema({2}), targets, cfg);
    CHECK(model.intercept == doctest::Approx(0.5));
    CHECK(predict_score(model, std::vector<int>{1}) == doctest::Approx(0.5));
  }

  TEST_CASE("config invariants are enforced") {
    Rng rng(69);
    const SupervisedSet set = random_set(rng, 30, {3, 3}, 0.5);
    const auto schema = make_schema({3, 3});
    EbmConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(fit_ebm(set, schema, cfg), ConfigError);
    cfg = EbmConfig{};
    cfg.max_leaves = 1;
    CHECK_THROWS_AS(fit_ebm(set, schema, cfg), ConfigError);
    cfg = EbmConfig{};
    cfg.n_interactions = 2;  // only one pair exists for d = 2
    CHECK_THROWS_AS(fit_ebm(set, schema, cfg), ConfigError);
    cfg = EbmConfig{};
    SupervisedSet bad = set;
    bad.labels[0] = 2;
    CHECK_THROWS_AS(fit_ebm(bad, schema, cfg), DataError);
  }

  TEST_CASE("prediction is a pure lookup: relabeled levels move with their table cells") {
    Rng rng(71);
    const std::vector<int> levels{6, 4};
    const SupervisedSet set = random_set(rng, 150, levels, 0.5);
    EbmConfig cfg;
    cfg.n_rounds = 30;
    cfg.validation_frac = 0.0;
    const EbmModel model = fit_ebm(set, make_schema(levels), cfg);

    // Permute feature 0's level indices consistently in the table and the
    // query row; scores must be unchanged (no ordinal arithmetic inside
    // prediction).
    const std::vector<int> perm{3, 5, 0, 4, 1, 2};
    EbmModel relabeled = model;
    for (int l = 0; l < 6; ++l) {
      relabeled.main_terms[0][static_cast<std::size_t>(perm[static_cast<std::size_t>(l)])] =
          model.main_terms[0][static_cast<std::size_t>(l)];
    }
    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 4; ++b) {
        const std::vector<int> plain{a, b};
        const std::vector<int> mapped{perm[static_cast<std::size_t>(a)], b};
        CHECK(predict_score(relabeled, mapped) == predict_score(model, plain));
      }
    }
  }

  TEST_CASE("parallel and serial batch prediction agree bit for bit") {
    Rng rng(70);
    const std::vector<int> levels{6, 5, 4};
    const SupervisedSet set = random_set(rng, 300, levels, 0.5);
    EbmConfig cfg;
    cfg.n_rounds = 30;
    cfg.n_interactions = 1;
    cfg.interaction_rounds = 10;
    cfg.validation_frac = 0.0;
    const EbmModel model = fit_ebm(set, make_schema(levels), cfg);
    CHECK(predict_scores(model, set) == predict_scores_serial(model, set));
  }
}
