#include "emakit/ebm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emakit/errors.hpp"
#include "emakit/fast.hpp"

namespace emakit {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

constexpr double kNewtonClip = 4.0;
constexpr double kHessFloor = 1e-12;

double stable_log_loss(double score, double y) {
  // log(1 + exp(score)) - y * score, computed without overflow.
  if (score >= 0.0) return std::log1p(std::exp(-score)) + (1.0 - y) * score;
  return std::log1p(std::exp(score)) - y * score;
}

double clamp_probability(double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); }

struct LevelStats {
  std::vector<double> count;
  std::vector<double> grad;  // residual sums
  std::vector<double> hess;
};

// Value
struct Partition {
  std::vector<int> seg_of_level;
  int n_segs = 1;
};

// Best contiguous partition (<= max_leaves segments) of the occupied levels
// by squared error on residuals; unoccupied levels join the nearest segment
// on their left. Single-segment fallback is always feasible.
Partition best_ordinal_partition(const LevelStats& stats, int max_leaves, int min_samples_leaf) {
  const auto n_levels = static_cast<int>(stats.count.size());
  std::vector<int> occ;
  for (int l = 0; l < n_levels; ++l) {
    if (stats.count[static_cast<std::size_t>(l)] > 0.0) occ.push_back(l);
  }
  Partition part;
  part.seg_of_level.assign(static_cast<std::size_t>(n_levels), 0);
  const auto m = static_cast<int>(occ.size());
  if (m <= 1) return part;

  std::vector<double> pc(static_cast<std::size_t>(m) + 1, 0.0);
  std::vector<double> pg(static_cast<std::size_t>(m) + 1, 0.0);
  for (int i = 0; i < m; ++i) {
    pc[static_cast<std::size_t>(i) + 1] =
        pc[static_cast<std::size_t>(i)] + stats.count[static_cast<std::size_t>(occ[i])];
    pg[static_cast<std::size_t>(i) + 1] =
        pg[static_cast<std::size_t>(i)] + stats.grad[static_cast<std::size_t>(occ[i])];
  }
  const auto seg_gain = [&](int lo, int hi) {  // occ range [lo, hi)
    const double c = pc[static_cast<std::size_t>(hi)] - pc[static_cast<std::size_t>(lo)];
    const double s = pg[static_cast<std::size_t>(hi)] - pg[static_cast<std::size_t>(lo)];
    return c > 0.0 ? s * s / c : 0.0;
  };
  const auto seg_count = [&](int lo, int hi) {
    return pc[static_cast<std::size_t>(hi)] - pc[static_cast<std::size_t>(lo)];
  };

  const int max_segs = std::min(max_leaves, m);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  // dp[t][i]: best gain covering occ[0, i) with exactly t segments.
  std::vector<std::vector<double>> dp(static_cast<std::size_t>(max_segs) + 1,
                                      std::vector<double>(static_cast<std::size_t>(m) + 1, neg_inf));
  std::vector<std::vector<int>> from(static_cast<std::size_t>(max_segs) + 1,
                                     std::vector<int>(static_cast<std::size_t>(m) + 1, -1));
  dp[0][0] = 0.0;
  for (int t = 1; t <= max_segs; ++t) {
    for (int i = t; i <= m; ++i) {
      for (int j = t - 1; j < i; ++j) {
        if (dp[static_cast<std::size_t>(t) - 1][static_cast<std::size_t>(j)] == neg_inf) continue;
        if (seg_count(j, i) < static_cast<double>(min_samples_leaf)) continue;
        const double gain = dp[static_cast<std::size_t>(t) - 1][static_cast<std::size_t>(j)] +
                            seg_gain(j, i);
        if (gain > dp[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]) {
          dp[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = gain;
          from[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = j;
        }
      }
    }
  }

  int best_t = 1;
  double best_gain = seg_gain(0, m);  // single segment, no leaf-size constraint
  for (int t = 2; t <= max_segs; ++t) {
    const double gain = dp[static_cast<std::size_t>(t)][static_cast<std::size_t>(m)];
    if (gain > best_gain) {
      best_gain = gain;
      best_t = t;
    }
  }
  if (best_t == 1) return part;

  // Recover segment boundaries (occ indices), then map raw levels.
  std::vector<int> bounds;  // segment end occ-indices, ascending
  int i = m;
  for (int t = best_t; t >= 1; --t) {
    bounds.push_back(i);
    i = from[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
  }
  std::reverse(bounds.begin(), bounds.end());

  part.n_segs = best_t;
  int seg = 0;
  for (int l = 0; l < n_levels; ++l) {
    while (seg + 1 < best_t && l > occ[static_cast<std::size_t>(bounds[static_cast<std::size_t>(seg)]) - 1]) {
      ++seg;
    }
    part.seg_of_level[static_cast<std::size_t>(l)] = seg;
  }
  return part;
}

// Categorical split: isolate up to max_leaves - 1 single levels against the
// rest. Exact search for one or two singletons, greedy beyond.
Partition best_categorical_partition(const LevelStats& stats, int max_leaves,
                                     int min_samples_leaf) {
  const auto n_levels = static_cast<int>(stats.count.size());
  Partition part;
  part.seg_of_level.assign(static_cast<std::size_t>(n_levels), 0);

  std::vector<int> occ;
  double total_count = 0.0, total_grad = 0.0;
  for (int l = 0; l < n_levels; ++l) {
    const auto li = static_cast<std::size_t>(l);
    if (stats.count[li] > 0.0) occ.push_back(l);
    total_count += stats.count[li];
    total_grad += stats.grad[li];
  }
  if (occ.size() <= 1) return part;

  const int n_singles_max = std::min(max_leaves - 1, static_cast<int>(occ.size()) - 1);
  const auto msl = static_cast<double>(min_samples_leaf);
  const auto subset_gain = [&](const std::vector<int>& singles) {
    double gain = 0.0, rest_c = total_count, rest_g = total_grad;
    for (int l : singles) {
      const auto li = static_cast<std::size_t>(l);
      if (stats.count[li] < msl) return -1.0;
      gain += stats.grad[li] * stats.grad[li] / stats.count[li];
      rest_c -= stats.count[li];
      rest_g -= stats.grad[li];
    }
    if (rest_c > 0.0 && rest_c < msl) return -1.0;
    if (rest_c > 0.0) gain += rest_g * rest_g / rest_c;
    return gain;
  };

  double best_gain = total_count > 0.0 ? total_grad * total_grad / total_count : 0.0;
  std::vector<int> best_singles;

  if (n_singles_max >= 1) {
    for (int a : occ) {
      const double gain = subset_gain({a});
      if (gain > best_gain) {
        best_gain = gain;
        best_singles = {a};
      }
    }
  }
  if (n_singles_max >= 2) {
    for (std::size_t x = 0; x < occ.size(); ++x) {
      for (std::size_t y = x + 1; y < occ.size(); ++y) {
        const double gain = subset_gain({occ[x], occ[y]});
        if (gain > best_gain) {
          best_gain = gain;
          best_singles = {occ[x], occ[y]};
        }
      }
    }
  }
  for (int extra = 3; extra <= n_singles_max; ++extra) {
    std::vector<int> candidate = best_singles;
    candidate.push_back(-1);
    double round_best = best_gain;
    int round_pick = -1;
    for (int a : occ) {
      if (std::find(best_singles.begin(), best_singles.end(), a) != best_singles.end()) continue;
      candidate.back() = a;
      const double gain = subset_gain(candidate);
      if (gain > round_best) {
        round_best = gain;
        round_pick = a;
      }
    }
    if (round_pick < 0) break;
    best_singles.push_back(round_pick);
    best_gain = round_best;
  }

  if (best_singles.empty()) return part;
  part.n_segs = static_cast<int>(best_singles.size()) + 1;
  std::sort(best_singles.begin(), best_singles.end());
  for (std::size_t s = 0; s < best_singles.size(); ++s) {
    part.seg_of_level[static_cast<std::size_t>(best_singles[s])] = static_cast<int>(s) + 1;
  }
  return part;
}

struct PairState {
  int fi = 0, fj = 0;
  int la = 0, lb = 0;
  std::vector<double> table;
};

class Trainer {
 public:
  Trainer(std::span<const int> features, std::size_t n_rows, const SchemaView& schema,
          std::span<const double> targets, const EbmConfig& cfg)
      : cfg_(cfg),
        schema_(schema),
        n_all_(n_rows),
        d_(schema.n_features()),
        targets_(targets.begin(), targets.end()),
        categorical_(schema.categorical.empty() ? std::vector<bool>(schema.n_features(), false)
                                                : schema.categorical) {
    cfg_.validate(d_);
    if (n_rows == 0) throw DataError("fit_ebm: empty training set");
    if (features.size() != n_rows * d_) throw DataError("fit_ebm: feature matrix shape mismatch");

    columns_.resize(d_);
    for (std::size_t f = 0; f < d_; ++f) {
      auto& col = columns_[f];
      col.resize(n_all_);
      const int level_count = schema_.levels[f];
      for (std::size_t r = 0; r < n_all_; ++r) {
        const int v = features[r * d_ + f];
        if (v < 0 || v >= level_count) {
          throw SchemaError("fit_ebm: feature '" + schema_.names[f] + "' level " +
                            std::to_string(v) + " outside [0, " + std::to_string(level_count) +
                            ")");
        }
        col[r] = v;
      }
    }

    // Temporal holdout: the last rows, never a random subset.
    std::size_t holdout = 0;
    if (cfg_.validation_frac > 0.0) {
      holdout = static_cast<std::size_t>(
          std::floor(static_cast<double>(n_all_) * cfg_.validation_frac + 1e-9));
    }
    n_train_ = holdout < n_all_ ? n_all_ - holdout : n_all_;
    if (n_train_ == 0 || n_train_ == n_all_) {
      n_train_ = n_all_;
      validate_ = false;
    } else {
      validate_ = true;
    }
  }

  EbmModel fit() {
    EbmModel model;
    model.link = cfg_.link;
    model.config = cfg_;
    model.feature_names = schema_.names;
    model.schema_fingerprint = schema_.fingerprint;
    model.main_terms.resize(d_);
    for (std::size_t f = 0; f < d_; ++f) {
      model.main_terms[f].assign(static_cast<std::size_t>(schema_.levels[f]), 0.0);
    }
    model.main_importance.assign(d_, 0.0);

    double target_mean = 0.0;
    for (std::size_t r = 0; r < n_train_; ++r) target_mean += targets_[r];
    target_mean /= static_cast<double>(n_train_);

    bool constant = true;
    for (std::size_t r = 1; r < n_train_ && constant; ++r) {
      constant = targets_[r] == targets_[0];
    }
    if (cfg_.link == LinkKind::Logistic) {
      model.intercept = std::log(clamp_probability(target_mean)) -
                        std::log1p(-clamp_probability(target_mean));
    } else {
      model.intercept = target_mean;
    }
    if (constant) {
      model.degenerate_target = true;
      return model;
    }

    intercept_ = model.intercept;
    score_.assign(n_all_, intercept_);
    terms_ = model.main_terms;

    run_main_stage(model);

    const std::size_t max_pairs = d_ >= 2 ? d_ * (d_ - 1) / 2 : 0;
    const auto k = std::min(static_cast<std::size_t>(cfg_.n_interactions), max_pairs);
    if (k > 0 && cfg_.interaction_rounds > 0) {
      run_interaction_stage(model, k);
    }

    finalize(model);
    return model;
  }

 private:
  double link_mean(double score) const {
    return cfg_.link == LinkKind::Logistic ? sigmoid(score) : score;
  }

  double loss_over(std::size_t begin, std::size_t end) const {
    double total = 0.0;
    if (cfg_.link == LinkKind::Logistic) {
      for (std::size_t r = begin; r < end; ++r) total += stable_log_loss(score_[r], targets_[r]);
    } else {
      for (std::size_t r = begin; r < end; ++r) {
        const double e = targets_[r] - score_[r];
        total += e * e;
      }
    }
    return total / static_cast<double>(end - begin);
  }

  void boost_feature(std::size_t f) {
    const auto n_levels = static_cast<std::size_t>(schema_.levels[f]);
    LevelStats stats;
    stats.count.assign(n_levels, 0.0);
    stats.grad.assign(n_levels, 0.0);
    stats.hess.assign(n_levels, 0.0);
    const auto& col = columns_[f];
    for (std::size_t r = 0; r < n_train_; ++r) {
      const auto l = static_cast<std::size_t>(col[r]);
      const double mu = link_mean(score_[r]);
      stats.count[l] += 1.0;
      stats.grad[l] += targets_[r] - mu;
      stats.hess[l] += cfg_.link == LinkKind::Logistic ? mu * (1.0 - mu) : 1.0;
    }

    const Partition part = categorical_[f]
                               ? best_categorical_partition(stats, cfg_.max_leaves,
                                                            cfg_.min_samples_leaf)
                               : best_ordinal_partition(stats, cfg_.max_leaves,
                                                        cfg_.min_samples_leaf);

    std::vector<double> seg_grad(static_cast<std::size_t>(part.n_segs), 0.0);
    std::vector<double> seg_hess(static_cast<std::size_t>(part.n_segs), 0.0);
    for (std::size_t l = 0; l < n_levels; ++l) {
      const auto s = static_cast<std::size_t>(part.seg_of_level[l]);
      seg_grad[s] += stats.grad[l];
      seg_hess[s] += stats.hess[l];
    }
    std::vector<double> delta(n_levels, 0.0);
    for (std::size_t l = 0; l < n_levels; ++l) {
      const auto s = static_cast<std::size_t>(part.seg_of_level[l]);
      double value = seg_grad[s] / std::max(seg_hess[s], kHessFloor);
      if (cfg_.link == LinkKind::Logistic) value = std::clamp(value, -kNewtonClip, kNewtonClip);
      delta[l] = cfg_.learning_rate * value;
    }

    auto& term = terms_[f];
    for (std::size_t l = 0; l < n_levels; ++l) term[l] += delta[l];
    for (std::size_t r = 0; r < n_all_; ++r) score_[r] += delta[static_cast<std::size_t>(col[r])];
  }

  void rebuild_scores(const std::vector<PairState>* pairs) {
    for (std::size_t r = 0; r < n_all_; ++r) {
      double s = intercept_;
      for (std::size_t f = 0; f < d_; ++f) {
        s += terms_[f][static_cast<std::size_t>(columns_[f][r])];
      }
      if (pairs != nullptr) {
        for (const auto& p : *pairs) {
          s += p.table[static_cast<std::size_t>(columns_[static_cast<std::size_t>(p.fi)][r]) *
                           static_cast<std::size_t>(p.lb) +
                       static_cast<std::size_t>(columns_[static_cast<std::size_t>(p.fj)][r])];
        }
      }
      score_[r] = s;
    }
  }

  void run_main_stage(EbmModel& model) {
    std::vector<std::vector<double>> best_terms = terms_;
    double best_loss = validate_ ? loss_over(n_train_, n_all_)
                                 : std::numeric_limits<double>::infinity();
    int best_round = 0;
    int stale = 0;

    int round = 0;
    for (; round < cfg_.n_rounds; ++round) {
      for (std::size_t f = 0; f < d_; ++f) boost_feature(f);
      model.train_loss_trace.push_back(loss_over(0, n_train_));
      if (!validate_) continue;
      const double holdout_loss = loss_over(n_train_, n_all_);
      if (holdout_loss < best_loss) {
        best_loss = holdout_loss;
        best_terms = terms_;
        best_round = round + 1;
        stale = 0;
      } else if (++stale >= cfg_.early_stop_patience && cfg_.early_stop_patience > 0) {
        ++round;
        break;
      }
    }

    if (validate_) {
      terms_ = best_terms;
      model.rounds_used = best_round;
      rebuild_scores(nullptr);
    } else {
      model.rounds_used = round;
    }
  }

  bool boost_pair(PairState& pair) {
    const auto la = static_cast<std::size_t>(pair.la);
    const auto lb = static_cast<std::size_t>(pair.lb);
    std::vector<double> cnt(la * lb, 0.0), grad(la * lb, 0.0), hess(la * lb, 0.0);
    const auto& ca = columns_[static_cast<std::size_t>(pair.fi)];
    const auto& cb = columns_[static_cast<std::size_t>(pair.fj)];
    for (std::size_t r = 0; r < n_train_; ++r) {
      const std::size_t cell = static_cast<std::size_t>(ca[r]) * lb + static_cast<std::size_t>(cb[r]);
      const double mu = link_mean(score_[r]);
      cnt[cell] += 1.0;
      grad[cell] += targets_[r] - mu;
      hess[cell] += cfg_.link == LinkKind::Logistic ? mu * (1.0 - mu) : 1.0;
    }

    auto cum = [&](std::vector<double>& m) {
      for (std::size_t a = 0; a < la; ++a) {
        for (std::size_t b = 1; b < lb; ++b) m[a * lb + b] += m[a * lb + b - 1];
      }
      for (std::size_t a = 1; a < la; ++a) {
        for (std::size_t b = 0; b < lb; ++b) m[a * lb + b] += m[(a - 1) * lb + b];
      }
    };
    std::vector<double> ccnt = cnt, cgrad = grad, chess = hess;
    cum(ccnt);
    cum(cgrad);
    cum(chess);

    const double tc = ccnt[(la - 1) * lb + lb - 1];
    const double tg = cgrad[(la - 1) * lb + lb - 1];
    const double th = chess[(la - 1) * lb + lb - 1];

    double best_gain = 0.0;
    int best_a = -1, best_b = -1;
    const auto msl = static_cast<double>(cfg_.min_samples_leaf);
    for (std::size_t cut_a = 0; cut_a + 1 < la; ++cut_a) {
      for (std::size_t cut_b = 0; cut_b + 1 < lb; ++cut_b) {
        const double c00 = ccnt[cut_a * lb + cut_b];
        const double g00 = cgrad[cut_a * lb + cut_b];
        const double c01 = ccnt[cut_a * lb + lb - 1] - c00;
        const double g01 = cgrad[cut_a * lb + lb - 1] - g00;
        const double c10 = ccnt[(la - 1) * lb + cut_b] - c00;
        const double g10 = cgrad[(la - 1) * lb + cut_b] - g00;
        const double c11 = tc - c00 - c01 - c10;
        const double g11 = tg - g00 - g01 - g10;
        bool valid = true;
        double gain = 0.0;
        for (const auto& [c, g] : {std::pair{c00, g00}, std::pair{c01, g01},
                                   std::pair{c10, g10}, std::pair{c11, g11}}) {
          if (c > 0.0 && c < msl) {
            valid = false;
            break;
          }
          if (c > 0.0) gain += g * g / c;
        }
        if (valid && gain > best_gain) {
          best_gain = gain;
          best_a = static_cast<int>(cut_a);
          best_b = static_cast<int>(cut_b);
        }
      }
    }
    if (best_a < 0) return false;

    const auto quad_value = [&](double c, double g, double h) {
      if (c <= 0.0) return 0.0;
      double value = g / std::max(h, kHessFloor);
      if (cfg_.link == LinkKind::Logistic) value = std::clamp(value, -kNewtonClip, kNewtonClip);
      return cfg_.learning_rate * value;
    };
    const auto ua = static_cast<std::size_t>(best_a);
    const auto ub = static_cast<std::size_t>(best_b);
    const double c00 = ccnt[ua * lb + ub], g00 = cgrad[ua * lb + ub], h00 = chess[ua * lb + ub];
    const double c01 = ccnt[ua * lb + lb - 1] - c00;
    const double g01 = cgrad[ua * lb + lb - 1] - g00;
    const double h01 = chess[ua * lb + lb - 1] - h00;
    const double c10 = ccnt[(la - 1) * lb + ub] - c00;
    const double g10 = cgrad[(la - 1) * lb + ub] - g00;
    const double h10 = chess[(la - 1) * lb + ub] - h00;
    const double c11 = tc - c00 - c01 - c10;
    const double g11 = tg - g00 - g01 - g10;
    const double h11 = th - h00 - h01 - h10;

    const double v00 = quad_value(c00, g00, h00);
    const double v01 = quad_value(c01, g01, h01);
    const double v10 = quad_value(c10, g10, h10);
    const double v11 = quad_value(c11, g11, h11);

    for (std::size_t a = 0; a < la; ++a) {
      for (std::size_t b = 0; b < lb; ++b) {
        const double v = a <= ua ? (b <= ub ? v00 : v01) : (b <= ub ? v10 : v11);
        pair.table[a * lb + b] += v;
      }
    }
    for (std::size_t r = 0; r < n_all_; ++r) {
      const bool left = static_cast<std::size_t>(ca[r]) <= ua;
      const bool low = static_cast<std::size_t>(cb[r]) <= ub;
      score_[r] += left ? (low ? v00 : v01) : (low ? v10 : v11);
    }
    return true;
  }

  void run_interaction_stage(EbmModel& model, std::size_t k) {
    std::vector<double> residuals(n_train_);
    for (std::size_t r = 0; r < n_train_; ++r) {
      residuals[r] = targets_[r] - link_mean(score_[r]);
    }
    std::vector<int> row_major(n_train_ * d_);
    for (std::size_t r = 0; r < n_train_; ++r) {
      for (std::size_t f = 0; f < d_; ++f) row_major[r * d_ + f] = columns_[f][r];
    }
    const auto ranking =
        rank_interactions(row_major, n_train_, d_, schema_.levels, residuals, k);

    pairs_.clear();
    for (const auto& entry : ranking) {
      PairState p;
      p.fi = entry.feature_i;
      p.fj = entry.feature_j;
      p.la = schema_.levels[static_cast<std::size_t>(entry.feature_i)];
      p.lb = schema_.levels[static_cast<std::size_t>(entry.feature_j)];
      p.table.assign(static_cast<std::size_t>(p.la) * static_cast<std::size_t>(p.lb), 0.0);
      pairs_.push_back(std::move(p));
    }
    if (pairs_.empty()) return;

    std::vector<PairState> best_pairs = pairs_;
    double best_loss = validate_ ? loss_over(n_train_, n_all_)
                                 : std::numeric_limits<double>::infinity();
    int best_round = 0;
    int stale = 0;

    int round = 0;
    for (; round < cfg_.interaction_rounds; ++round) {
      for (auto& pair : pairs_) boost_pair(pair);
      model.train_loss_trace.push_back(loss_over(0, n_train_));
      if (!validate_) continue;
      const double holdout_loss = loss_over(n_train_, n_all_);
      if (holdout_loss < best_loss) {
        best_loss = holdout_loss;
        best_pairs = pairs_;
        best_round = round + 1;
        stale = 0;
      } else if (++stale >= cfg_.early_stop_patience && cfg_.early_stop_patience > 0) {
        ++round;
        break;
      }
    }

    if (validate_) {
      pairs_ = best_pairs;
      model.interaction_rounds_used = best_round;
      rebuild_scores(&pairs_);
    } else {
      model.interaction_rounds_used = round;
    }
  }

  // Mean-center every term under the training level distribution, folding
  // the extracted means into the intercept, then compute importances.
  void finalize(EbmModel& model) {
    for (std::size_t f = 0; f < d_; ++f) {
      const auto n_levels = static_cast<std::size_t>(schema_.levels[f]);
      std::vector<double> weight(n_levels, 0.0);
      for (std::size_t r = 0; r < n_train_; ++r) {
        weight[static_cast<std::size_t>(columns_[f][r])] += 1.0;
      }
      double mean = 0.0;
      for (std::size_t l = 0; l < n_levels; ++l) mean += weight[l] * terms_[f][l];
      mean /= static_cast<double>(n_train_);
      double importance = 0.0;
      for (std::size_t l = 0; l < n_levels; ++l) {
        terms_[f][l] -= mean;
        importance += weight[l] * std::abs(terms_[f][l]);
      }
      intercept_ += mean;
      model.main_importance[f] = importance / static_cast<double>(n_train_);
    }

    for (auto& pair : pairs_) {
      const auto la = static_cast<std::size_t>(pair.la);
      const auto lb = static_cast<std::size_t>(pair.lb);
      std::vector<double> weight(la * lb, 0.0);
      const auto& ca = columns_[static_cast<std::size_t>(pair.fi)];
      const auto& cb = columns_[static_cast<std::size_t>(pair.fj)];
      for (std::size_t r = 0; r < n_train_; ++r) {
        weight[static_cast<std::size_t>(ca[r]) * lb + static_cast<std::size_t>(cb[r])] += 1.0;
      }
      double mean = 0.0;
      for (std::size_t c = 0; c < la * lb; ++c) mean += weight[c] * pair.table[c];
      mean /= static_cast<double>(n_train_);
      double importance = 0.0;
      for (std::size_t c = 0; c < la * lb; ++c) {
        pair.table[c] -= mean;
        importance += weight[c] * std::abs(pair.table[c]);
      }
      intercept_ += mean;

      PairTerm term;
      term.feature_i = pair.fi;
      term.feature_j = pair.fj;
      term.rows = pair.la;
      term.cols = pair.lb;
      term.table = pair.table;
      term.importance = importance / static_cast<double>(n_train_);
      model.pair_terms.push_back(std::move(term));
    }

    model.intercept = intercept_;
    model.main_terms = terms_;
  }

  EbmConfig cfg_;
  SchemaView schema_;
  std::size_t n_all_ = 0;
  std::size_t n_train_ = 0;
  std::size_t d_ = 0;
  bool validate_ = false;
  std::vector<double> targets_;
  std::vector<bool> categorical_;
  std::vector<std::vector<int>> columns_;  // feature-major level cache
  std::vector<double> score_;
  std::vector<std::vector<double>> terms_;
  std::vector<PairState> pairs_;
  double intercept_ = 0.0;
};

}  // namespace

void EbmConfig::validate(std::size_t n_features) const {
  if (n_rounds < 0) throw ConfigError("EbmConfig: n_rounds must be >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ConfigError("EbmConfig: learning_rate must be in (0, 1]");
  }
  if (max_leaves < 2) throw ConfigError("EbmConfig: max_leaves must be >= 2");
  if (min_samples_leaf < 1) throw ConfigError("EbmConfig: min_samples_leaf must be >= 1");
  if (interaction_rounds < 0) throw ConfigError("EbmConfig: interaction_rounds must be >= 0");
  if (validation_frac < 0.0 || validation_frac >= 1.0) {
    throw ConfigError("EbmConfig: validation_frac must be in [0, 1)");
  }
  if (n_interactions < 0) throw ConfigError("EbmConfig: n_interactions must be >= 0");
  const std::size_t max_pairs = n_features >= 2 ? n_features * (n_features - 1) / 2 : 0;
  if (static_cast<std::size_t>(n_interactions) > max_pairs) {
    throw ConfigError("EbmConfig: n_interactions exceeds feature pair count");
  }
}

EbmModel fit_ebm(const SupervisedSet& train, const SchemaView& schema, const EbmConfig& config) {
  if (config.link == LinkKind::Logistic) {
    for (int label : train.labels) {
      if (label != 0 && label != 1) {
        throw DataError("fit_ebm: logistic link requires binary labels");
      }
    }
  }
  std::vector<double> targets(train.labels.begin(), train.labels.end());
  Trainer trainer(train.features, train.n_rows(), schema, targets, config);
  return trainer.fit();
}

EbmModel fit_ebm_regression(std::span<const int> features, std::size_t n_rows,
                            const SchemaView& schema, std::span<const double> targets,
                            const EbmConfig& config) {
  if (config.link != LinkKind::Identity) {
    throw ConfigError("fit_ebm_regression: identity link required");
  }
  Trainer trainer(features, n_rows, schema, targets, config);
  return trainer.fit();
}

double predict_score(const EbmModel& model, std::span<const int> row) {
  if (row.size() != model.main_terms.size()) {
    throw SchemaError("predict_score: row has " + std::to_string(row.size()) +
                      " features, model expects " + std::to_string(model.main_terms.size()));
  }
  double score = model.intercept;
  for (std::size_t f = 0; f < row.size(); ++f) {
    const auto& term = model.main_terms[f];
    if (row[f] < 0 || static_cast<std::size_t>(row[f]) >= term.size()) {
      const std::string name =
          f < model.feature_names.size() ? model.feature_names[f] : std::to_string(f);
      throw SchemaError("predict_score: feature '" + name + "' level " +
                        std::to_string(row[f]) + " outside [0, " +
                        std::to_string(term.size()) + ")");
    }
    score += term[static_cast<std::size_t>(row[f])];
  }
  for (const auto& pair : model.pair_terms) {
    score += pair.at(row[static_cast<std::size_t>(pair.feature_i)],
                     row[static_cast<std::size_t>(pair.feature_j)]);
  }
  return score;
}

double predict_proba(const EbmModel& model, std::span<const int> row) {
  if (model.link != LinkKind::Logistic) {
    throw ConfigError("predict_proba: model does not use the logistic link");
  }
  return sigmoid(predict_score(model, row));
}

std::vector<double> predict_scores(const EbmModel& model, const SupervisedSet& set) {
  std::vector<double> scores(set.n_rows());
  const auto n = static_cast<std::ptrdiff_t>(set.n_rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    scores[static_cast<std::size_t>(r)] = predict_score(model, set.row(static_cast<std::size_t>(r)));
  }
  return scores;
}

std::vector<double> predict_scores_serial(const EbmModel& model, const SupervisedSet& set) {
  std::vector<double> scores(set.n_rows());
  for (std::size_t r = 0; r < set.n_rows(); ++r) scores[r] = predict_score(model, set.row(r));
  return scores;
}

ShapeFunctions extract_shape_functions(const EbmModel& model) {
  ShapeFunctions shapes;
  shapes.intercept = model.intercept;
  shapes.names = model.feature_names;
  shapes.main_tables = model.main_terms;
  shapes.main_importance = model.main_importance;
  shapes.pair_tables = model.pair_terms;
  return shapes;
}

}  // namespace emakit
