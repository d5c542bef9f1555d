#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "emakit/ebm.hpp"
#include "emakit/linear.hpp"
#include "emakit/types.hpp"

namespace emakit {

struct CvScore {
  double mean_auc = 0.0;
  std::size_t valid_splits = 0;
  std::size_t skipped_splits = 0;  // single-class test blocks
};

// Fits on the expanding train window, returns ranking scores for the test
// block rows.
using FitPredictFn =
    std::function<std::vector<double>(const SupervisedSet& train, const SupervisedSet& test)>;

// Mean AUC over the k expanding-window splits; splits whose test block is
// single-class are skipped and counted. nullopt when no split is usable
// (CV-infeasible for this data and k).
std::optional<CvScore> cv_score(const SupervisedSet& set, int k, const FitPredictFn& fit_predict);

struct EbmGridResult {
  bool infeasible = false;
  std::vector<int> candidates;  // ascending, deduplicated, clamped to d(d-1)/2
  std::vector<CvScore> table;
  std::size_t best_index = 0;
  int best_n_interactions = 0;
  double best_cv_auc = 0.0;
};

// Grid over the interaction count; ties resolve toward the simplest
// candidate (fewest interactions) because candidates are scanned ascending
// with strict improvement.
EbmGridResult grid_search_ebm(const SupervisedSet& train, const SchemaView& schema,
                              const EbmConfig& base, std::vector<int> interaction_grid, int k);

struct LogRegGridResult {
  bool infeasible = false;
  std::vector<double> candidates;  // descending, strongest regularization first
  std::vector<CvScore> table;
  std::size_t best_index = 0;
  double best_l2 = 0.0;
  double best_cv_auc = 0.0;
};

LogRegGridResult grid_search_logreg(const SupervisedSet& train, const SchemaView& schema,
                                    std::vector<double> l2_grid, int k, int max_iter = 500,
                                    double tol = 1e-6);

// Contiguous row slice [begin, end) of a supervised set.
SupervisedSet slice_rows(const SupervisedSet& set, std::size_t begin, std::size_t end);

}  // namespace emakit
