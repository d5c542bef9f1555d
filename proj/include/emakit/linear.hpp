#pragma once

#include <span>
#include <string>
#include <vector>

#include "emakit/types.hpp"

namespace emakit {

// L2-regularized logistic regression over one-hot encoded levels; the
// linear reference point for the additive models.
struct LinearModel {
  std::vector<double> weights;  // length = sum of level counts
  double bias = 0.0;
  double l2 = 0.0;
  std::vector<std::string> feature_names;
  std::vector<int> levels;
  std::string schema_fingerprint;
  bool degenerate = false;
  bool converged = false;
  int iterations = 0;
  double final_loss = 0.0;

  std::size_t onehot_offset(std::size_t feature) const;
};

// Deterministic full-batch gradient descent with backtracking line search;
// converged when the gradient infinity-norm drops below tol. Single-class
// data yields a flagged constant predictor.
LinearModel fit_logreg(const SupervisedSet& train, const SchemaView& schema, double l2,
                       int max_iter = 500, double tol = 1e-6,
                       const std::vector<double>* warm_start = nullptr);

// sigma(w . onehot(x) + b). Throws SchemaError on out-of-range levels.
double predict_linear(const LinearModel& model, std::span<const int> row);

std::vector<double> predict_linear_batch(const LinearModel& model, const SupervisedSet& set);

// Regularized objective at the model's parameters on the given data.
double logreg_loss(const LinearModel& model, const SupervisedSet& set);

}  // namespace emakit
