#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "emakit/types.hpp"

namespace emakit {

enum class LinkKind { Logistic, Identity };

struct EbmConfig {
  int n_rounds = 500;
  double learning_rate = 0.05;
  int max_leaves = 3;          // per single-feature tree
  int n_interactions = 0;      // pair terms kept from the FAST ranking
  int interaction_rounds = 100;
  LinkKind link = LinkKind::Logistic;
  int min_samples_leaf = 2;
  double validation_frac = 0.15;  // temporally last slice; 0 disables early stopping
  int early_stop_patience = 50;   // rounds without holdout improvement before stopping
  std::uint64_t seed = 0;

  void validate(std::size_t n_features) const;  // throws ConfigError
};

struct PairTerm {
  int feature_i = 0;
  int feature_j = 0;
  int rows = 0;  // levels of feature_i
  int cols = 0;  // levels of feature_j
  std::vector<double> table;  // row-major rows x cols, mean-centered
  double importance = 0.0;

  double at(int a, int b) const { return table[static_cast<std::size_t>(a * cols + b)]; }
};

// Additive model: score(x) = intercept + sum_i main_terms[i][x_i]
//                          + sum_(i,j) pair_terms[(i,j)][x_i, x_j].
// Terms are mean-centered under the training level distribution; the
// extracted means live in the intercept. Immutable once fitted.
struct EbmModel {
  LinkKind link = LinkKind::Logistic;
  double intercept = 0.0;
  std::vector<std::vector<double>> main_terms;  // [feature][level]
  std::vector<double> main_importance;          // mean |contribution| on training rows
  std::vector<PairTerm> pair_terms;
  std::vector<std::string> feature_names;
  std::string schema_fingerprint;
  bool degenerate_target = false;
  EbmConfig config;
  int rounds_used = 0;
  int interaction_rounds_used = 0;
  std::vector<double> train_loss_trace;  // per main-stage round, on the fitting rows
};

// Cyclic gradient boosting of single-feature shallow trees (stage 1), then
// FAST-ranked pair terms boosted on frozen main effects (stage 2). Logistic
// link takes binary labels; constant labels yield an intercept-only model
// flagged degenerate. Throws DataError on an empty training set.
EbmModel fit_ebm(const SupervisedSet& train, const SchemaView& schema, const EbmConfig& config);

// Real-valued targets (soft labels in [0,1] accepted); Identity link only.
EbmModel fit_ebm_regression(std::span<const int> features, std::size_t n_rows,
                            const SchemaView& schema, std::span<const double> targets,
                            const EbmConfig& config);

// Pure lookup evaluation. Throws SchemaError when a level index is outside
// the schema the model was trained on, naming the feature.
double predict_score(const EbmModel& model, std::span<const int> row);

// Logistic-link models only; sigma(predict_score). Throws ConfigError on an
// Identity-link model.
double predict_proba(const EbmModel& model, std::span<const int> row);

std::vector<double> predict_scores(const EbmModel& model, const SupervisedSet& set);
std::vector<double> predict_scores_serial(const EbmModel& model, const SupervisedSet& set);

struct ShapeFunctions {
  double intercept = 0.0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> main_tables;
  std::vector<double> main_importance;
  std::vector<PairTerm> pair_tables;
};

// Centered lookup tables verbatim plus per-term importances, for export.
ShapeFunctions extract_shape_functions(const EbmModel& model);

double sigmoid(double z);

}  // namespace emakit
