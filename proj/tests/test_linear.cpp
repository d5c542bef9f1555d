#include <doctest.h>

#include <cmath>

#include "emakit/errors.hpp"
#include "emakit/linear.hpp"
#include "emakit/metrics.hpp"
#include "emakit/rng.hpp"

using namespace emakit;

namespace {

SchemaView make_schema(const std::vector<int>& levels) {
  std::vector<FeatureSpec> specs;
  for (std::size_t f = 0; f < levels.size(); ++f) {
    specs.push_back({"f" + std::to_string(f), FeatureKind::Ordinal, levels[f], {}, false});
  }
  return SchemaView::from(specs);
}

}  // namespace

TEST_SUITE("linear") {
  TEST_CASE("separable one-dimensional data reaches AUC 1") {
    SupervisedSet set;
    int t = 0;
    for (int l = 0; l < 6; ++l) {
      for (int rep = 0; rep < 10; ++rep) {
        set.append_row(std::vector<int>{l}, l >= 3 ? 1 : 0, t++, "p");
      }
    }
    const auto schema = make_schema({6});
    const LinearModel model = fit_logreg(set, schema, 0.01, 2000, 1e-7);
    const auto auc = roc_auc(set.labels, predict_linear_batch(model, set));
    CHECK(*auc == doctest::Approx(1.0));
  }

  TEST_CASE("xor is not linearly separable") {
    SupervisedSet set;
    int t = 0;
    for (int a = 0; a <= 1; ++a) {
      for (int b = 0; b <= 1; ++b) {
        for (int rep = 0; rep < 25; ++rep) {
          set.append_row(std::vector<int>{a, b}, a == b ? 1 : 0, t++, "p");
        }
      }
    }
    const LinearModel model = fit_logreg(set, make_schema({2, 2}), 0.01, 1000, 1e-7);
    CHECK(*roc_auc(set.labels, predict_linear_batch(model, set)) <= 0.6);
  }

  TEST_CASE("huge regularization collapses to the base rate") {
    Rng rng(81);
    SupervisedSet set;
    for (int i = 0; i < 100; ++i) {
      set.append_row(std::vector<int>{static_cast<int>(rng.next_below(4))},
                     rng.next_bernoulli(0.6), i, "p");
    }
    const double base_rate =
        static_cast<double>(set.positives()) / static_cast<double>(set.n_rows());
    const LinearModel model = fit_logreg(set, make_schema({4}), 1e6, 2000, 1e-9);
    for (double w : model.weights) CHECK(std::abs(w) < 1e-3);
    for (std::size_t r = 0; r < set.n_rows(); ++r) {
      CHECK(predict_linear(model, set.row(r)) == doctest::Approx(base_rate).epsilon(0.05));
    }
  }

  TEST_CASE("hand-built models evaluate the logistic form") {
    LinearModel model;
    model.levels = {2};
    model.feature_names = {"f0"};
    model.weights = {0.0, 0.0};
    model.bias = 0.0;
    CHECK(predict_linear(model, std::vector<int>{0}) == doctest::Approx(0.5));
    model.bias = 2.0;
    CHECK(predict_linear(model, std::vector<int>{1}) == doctest::Approx(0.8808).epsilon(1e-3));

    LinearModel negated = model;
    negated.bias = -model.bias;
    for (auto& w : negated.weights) w = -w;
    model.weights = {0.3, -0.7};
    negated.weights = {-0.3, 0.7};
    for (int l = 0; l < 2; ++l) {
      CHECK(predict_linear(negated, std::vector<int>{l}) ==
            doctest::Approx(1.0 - predict_linear(model, std::vector<int>{l})));
    }
  }

  TEST_CASE("accepted steps never increase the objective") {
    Rng rng(83);
    SupervisedSet set;
    for (int i = 0; i < 80; ++i) {
      set.append_row(std::vector<int>{static_cast<int>(rng.next_below(5))},
                     rng.next_bernoulli(0.5), i, "p");
    }
    const auto schema = make_schema({5});
    const LinearModel fitted = fit_logreg(set, schema, 0.5, 300, 1e-8);
    LinearModel zero = fitted;
    std::fill(zero.weights.begin(), zero.weights.end(), 0.0);
    zero.bias = 0.0;
    CHECK(fitted.final_loss <= logreg_loss(zero, set) + 1e-12);
    CHECK(fitted.final_loss == doctest::Approx(logreg_loss(fitted, set)));
  }

  TEST_CASE("the regularized optimum is initialization-independent") {
    Rng rng(82);
    SupervisedSet set;
    for (int i = 0; i < 120; ++i) {
      const int a = static_cast<int>(rng.next_below(4));
      const int b = static_cast<int>(rng.next_below(3));
      const double p = 0.15 + 0.2 * a + 0.05 * b;  // in (0, 1) for these levels
      set.append_row(std::vector<int>{a, b}, rng.next_unit() < p ? 1 : 0, i, "p");
    }
    const auto schema = make_schema({4, 3});
    const LinearModel cold = fit_logreg(set, schema, 0.1, 5000, 1e-9);

    std::vector<double> warm(4 + 3 + 1);
    for (auto& w : warm) w = rng.next_uniform(-2.0, 2.0);
    const LinearModel hot = fit_logreg(set, schema, 0.1, 5000, 1e-9, &warm);
    CHECK(std::abs(cold.final_loss - hot.final_loss) < 1e-6);
  }

  TEST_CASE("single-class data degrades to a constant predictor") {
    SupervisedSet set;
    for (int i = 0; i < 10; ++i) set.append_row(std::vector<int>{i % 2}, 1, i, "p");
    const LinearModel model = fit_logreg(set, make_schema({2}), 0.1);
    CHECK(model.degenerate);
    CHECK(predict_linear(model, std::vector<int>{0}) ==
          predict_linear(model, std::vector<int>{1}));
  }

  TEST_CASE("schema violations are named") {
    SupervisedSet set;
    for (int i = 0; i < 20; ++i) set.append_row(std::vector<int>{i % 2}, i % 2, i, "p");
    const LinearModel model = fit_logreg(set, make_schema({2}), 0.1);
    CHECK_THROWS_AS(predict_linear(model, std::vector<int>{5}), SchemaError);
    CHECK_THROWS_AS(predict_linear(model, std::vector<int>{0, 1}), SchemaError);
    CHECK_THROWS_AS(fit_logreg(set, make_schema({2}), -1.0), ConfigError);
  }
}
