#include "emakit/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emakit/ebm.hpp"  // sigmoid
#include "emakit/errors.hpp"

namespace emakit {

namespace {

double stable_softplus_loss(double score, double y) {
  if (score >= 0.0) return std::log1p(std::exp(-score)) + (1.0 - y) * score;
  return std::log1p(std::exp(score)) - y * score;
}

struct Objective {
  const SupervisedSet& set;
  const std::vector<std::size_t>& offsets;
  double l2;

  double loss(const std::vector<double>& w, double b) const {
    const double n = static_cast<double>(set.n_rows());
    double total = 0.0;
    for (std::size_t r = 0; r < set.n_rows(); ++r) {
      double z = b;
      for (std::size_t f = 0; f < set.n_cols; ++f) {
        z += w[offsets[f] + static_cast<std::size_t>(set.at(r, f))];
      }
      total += stable_softplus_loss(z, static_cast<double>(set.labels[r]));
    }
    double penalty = 0.0;
    for (double v : w) penalty += v * v;
    return total / n + 0.5 * l2 * penalty / n;
  }

  void gradient(const std::vector<double>& w, double b, std::vector<double>& gw,
                double& gb) const {
    const double n = static_cast<double>(set.n_rows());
    std::fill(gw.begin(), gw.end(), 0.0);
    gb = 0.0;
    for (std::size_t r = 0; r < set.n_rows(); ++r) {
      double z = b;
      for (std::size_t f = 0; f < set.n_cols; ++f) {
        z += w[offsets[f] + static_cast<std::size_t>(set.at(r, f))];
      }
      const double err = sigmoid(z) - static_cast<double>(set.labels[r]);
      gb += err;
      for (std::size_t f = 0; f < set.n_cols; ++f) {
        gw[offsets[f] + static_cast<std::size_t>(set.at(r, f))] += err;
      }
    }
    for (std::size_t i = 0; i < gw.size(); ++i) gw[i] = gw[i] / n + l2 * w[i] / n;
    gb /= n;
  }
};

}  // namespace

std::size_t LinearModel::onehot_offset(std::size_t feature) const {
  std::size_t offset = 0;
  for (std::size_t f = 0; f < feature; ++f) offset += static_cast<std::size_t>(levels[f]);
  return offset;
}

LinearModel fit_logreg(const SupervisedSet& train, const SchemaView& schema, double l2,
                       int max_iter, double tol, const std::vector<double>* warm_start) {
  if (l2 < 0.0) throw ConfigError("fit_logreg: l2 must be >= 0");
  if (train.n_rows() == 0) throw DataError("fit_logreg: empty training set");
  if (train.n_cols != schema.n_features()) throw DataError("fit_logreg: schema mismatch");

  LinearModel model;
  model.l2 = l2;
  model.feature_names = schema.names;
  model.levels = schema.levels;
  model.schema_fingerprint = schema.fingerprint;

  std::size_t dim = 0;
  std::vector<std::size_t> offsets(schema.n_features(), 0);
  for (std::size_t f = 0; f < schema.n_features(); ++f) {
    offsets[f] = dim;
    dim += static_cast<std::size_t>(schema.levels[f]);
  }
  model.weights.assign(dim, 0.0);

  const std::size_t positives = train.positives();
  if (positives == 0 || positives == train.n_rows()) {
    model.degenerate = true;
    const double p = std::clamp(
        static_cast<double>(positives) / static_cast<double>(train.n_rows()), 1e-12, 1.0 - 1e-12);
    model.bias = std::log(p) - std::log1p(-p);
    return model;
  }

  for (std::size_t r = 0; r < train.n_rows(); ++r) {
    for (std::size_t f = 0; f < train.n_cols; ++f) {
      if (train.at(r, f) < 0 || train.at(r, f) >= schema.levels[f]) {
        throw SchemaError("fit_logreg: feature '" + schema.names[f] + "' level " +
                          std::to_string(train.at(r, f)) + " outside schema");
      }
    }
  }

  if (warm_start != nullptr) {
    if (warm_start->size() != dim + 1) throw ConfigError("fit_logreg: warm start size mismatch");
    model.weights.assign(warm_start->begin(), warm_start->end() - 1);
    model.bias = warm_start->back();
  }

  Objective obj{train, offsets, l2};

  // Diagonal curvature bound of the logistic Hessian per one-hot weight:
  // 0.25 * activation_count / n + l2 / n. Scaling the gradient by its
  // inverse keeps the line search effective across l2 regimes.
  std::vector<double> precond(dim, 0.0);
  {
    const double n = static_cast<double>(train.n_rows());
    for (std::size_t r = 0; r < train.n_rows(); ++r) {
      for (std::size_t f = 0; f < train.n_cols; ++f) {
        precond[offsets[f] + static_cast<std::size_t>(train.at(r, f))] += 0.25 / n;
      }
    }
    for (double& m : precond) m = std::max(m + l2 / n, 1e-8);
  }

  std::vector<double> grad(dim, 0.0);
  double grad_b = 0.0;
  double loss = obj.loss(model.weights, model.bias);

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    obj.gradient(model.weights, model.bias, grad, grad_b);
    double grad_inf = std::abs(grad_b);
    for (double g : grad) grad_inf = std::max(grad_inf, std::abs(g));
    if (grad_inf < tol) {
      model.converged = true;
      break;
    }

    // Preconditioned descent direction and its slope g . d.
    double slope = grad_b * grad_b / 0.25;
    for (std::size_t i = 0; i < dim; ++i) slope += grad[i] * grad[i] / precond[i];

    // Backtracking line search (Armijo, c = 1/2).
    double step = 1.0;
    std::vector<double> next_w(dim);
    double next_b = 0.0;
    double next_loss = loss;
    bool accepted = false;
    while (step > 1e-14) {
      for (std::size_t i = 0; i < dim; ++i) {
        next_w[i] = model.weights[i] - step * grad[i] / precond[i];
      }
      next_b = model.bias - step * grad_b / 0.25;
      next_loss = obj.loss(next_w, next_b);
      if (next_loss <= loss - 0.5 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent step representable
    model.weights.swap(next_w);
    model.bias = next_b;
    loss = next_loss;
  }

  model.iterations = iter;
  model.final_loss = loss;
  return model;
}

double predict_linear(const LinearModel& model, std::span<const int> row) {
  if (row.size() != model.levels.size()) {
    throw SchemaError("predict_linear: row length does not match schema");
  }
  double z = model.bias;
  std::size_t offset = 0;
  for (std::size_t f = 0; f < row.size(); ++f) {
    const auto level_count = static_cast<std::size_t>(model.levels[f]);
    if (row[f] < 0 || static_cast<std::size_t>(row[f]) >= level_count) {
      throw SchemaError("predict_linear: feature '" + model.feature_names[f] + "' level " +
                        std::to_string(row[f]) + " outside [0, " + std::to_string(level_count) +
                        ")");
    }
    z += model.weights[offset + static_cast<std::size_t>(row[f])];
    offset += level_count;
  }
  return sigmoid(z);
}

std::vector<double> predict_linear_batch(const LinearModel& model, const SupervisedSet& set) {
  std::vector<double> out(set.n_rows());
  const auto n = static_cast<std::ptrdiff_t>(set.n_rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)] = predict_linear(model, set.row(static_cast<std::size_t>(r)));
  }
  return out;
}

double logreg_loss(const LinearModel& model, const SupervisedSet& set) {
  std::vector<std::size_t> offsets(model.levels.size(), 0);
  std::size_t dim = 0;
  for (std::size_t f = 0; f < model.levels.size(); ++f) {
    offsets[f] = dim;
    dim += static_cast<std::size_t>(model.levels[f]);
  }
  Objective obj{set, offsets, model.l2};
  return obj.loss(model.weights, model.bias);
}

}  // namespace emakit
