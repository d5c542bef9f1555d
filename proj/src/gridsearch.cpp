#include "emakit/gridsearch.hpp"

#include <algorithm>
#include <cmath>

#include "emakit/cv.hpp"
#include "emakit/errors.hpp"
#include "emakit/metrics.hpp"

namespace emakit {

SupervisedSet slice_rows(const SupervisedSet& set, std::size_t begin, std::size_t end) {
  SupervisedSet out;
  out.n_cols = set.n_cols;
  for (std::size_t r = begin; r < end; ++r) {
    out.append_row(set.row(r), set.labels[r], set.row_timestamps[r], set.row_individual[r]);
  }
  return out;
}

std::optional<CvScore> cv_score(const SupervisedSet& set, int k, const FitPredictFn& fit_predict) {
  const auto plan = ts_cv_split(set.n_rows(), k);
  if (!plan) return std::nullopt;

  CvScore score;
  double total = 0.0;
  for (const auto& split : plan->splits) {
    const SupervisedSet test = slice_rows(set, split.test_begin, split.test_end);
    if (test.minority_count() == 0) {
      ++score.skipped_splits;
      continue;
    }
    const SupervisedSet train = slice_rows(set, 0, split.train_end);
    const std::vector<double> preds = fit_predict(train, test);
    const auto auc = roc_auc(test.labels, preds);
    if (!auc) {
      ++score.skipped_splits;
      continue;
    }
    total += *auc;
    ++score.valid_splits;
  }
  if (score.valid_splits == 0) return std::nullopt;
  score.mean_auc = total / static_cast<double>(score.valid_splits);
  return score;
}

EbmGridResult grid_search_ebm(const SupervisedSet& train, const SchemaView& schema,
                              const EbmConfig& base, std::vector<int> interaction_grid, int k) {
  if (interaction_grid.empty()) throw ConfigError("grid_search_ebm: empty grid");
  const std::size_t d = schema.n_features();
  const int max_pairs = d >= 2 ? static_cast<int>(d * (d - 1) / 2) : 0;
  for (int& v : interaction_grid) v = std::clamp(v, 0, max_pairs);
  std::sort(interaction_grid.begin(), interaction_grid.end());
  interaction_grid.erase(std::unique(interaction_grid.begin(), interaction_grid.end()),
                         interaction_grid.end());

  EbmGridResult result;
  result.candidates = interaction_grid;
  double best = -1.0;
  for (std::size_t c = 0; c < interaction_grid.size(); ++c) {
    EbmConfig cfg = base;
    cfg.n_interactions = interaction_grid[c];
    const auto cv = cv_score(train, k, [&](const SupervisedSet& tr, const SupervisedSet& te) {
      const EbmModel model = fit_ebm(tr, schema, cfg);
      return predict_scores(model, te);
    });
    if (!cv) {
      result.infeasible = true;
      return result;
    }
    result.table.push_back(*cv);
    if (cv->mean_auc > best) {
      best = cv->mean_auc;
      result.best_index = c;
    }
  }
  result.best_n_interactions = interaction_grid[result.best_index];
  result.best_cv_auc = best;
  return result;
}

LogRegGridResult grid_search_logreg(const SupervisedSet& train, const SchemaView& schema,
                                    std::vector<double> l2_grid, int k, int max_iter,
                                    double tol) {
  if (l2_grid.empty()) throw ConfigError("grid_search_logreg: empty grid");
  std::sort(l2_grid.begin(), l2_grid.end(), std::greater<>());
  l2_grid.erase(std::unique(l2_grid.begin(), l2_grid.end()), l2_grid.end());

  LogRegGridResult result;
  result.candidates = l2_grid;
  double best = -1.0;
  for (std::size_t c = 0; c < l2_grid.size(); ++c) {
    const auto cv = cv_score(train, k, [&](const SupervisedSet& tr, const SupervisedSet& te) {
      const LinearModel model = fit_logreg(tr, schema, l2_grid[c], max_iter, tol);
      return predict_linear_batch(model, te);
    });
    if (!cv) {
      result.infeasible = true;
      return result;
    }
    result.table.push_back(*cv);
    if (cv->mean_auc > best) {
      best = cv->mean_auc;
      result.best_index = c;
    }
  }
  result.best_l2 = l2_grid[result.best_index];
  result.best_cv_auc = best;
  return result;
}

}  // namespace emakit
