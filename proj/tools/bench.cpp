// Benchmark comparing the OpenMP kernels against their serial references:
// the FAST pair scan and batch score prediction.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "emakit/ebm.hpp"
#include "emakit/fast.hpp"
#include "emakit/rng.hpp"
#include "emakit/types.hpp"

using namespace emakit;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, seconds_since(start));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n_rows = 20000;
  std::size_t n_cols = 40;
  if (argc > 1) n_rows = static_cast<std::size_t>(std::atoll(argv[1]));
  if (argc > 2) n_cols = static_cast<std::size_t>(std::atoll(argv[2]));

#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled at build time\n");
#endif
  std::printf("data: %zu rows x %zu features\n\n", n_rows, n_cols);

  Rng rng(1234);
  std::vector<int> levels(n_cols, 6);
  std::vector<int> features(n_rows * n_cols);
  std::vector<double> residuals(n_rows);
  SupervisedSet set;
  set.n_cols = n_cols;
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t f = 0; f < n_cols; ++f) {
      features[r * n_cols + f] = static_cast<int>(rng.next_below(6));
    }
    residuals[r] = rng.next_normal();
    set.append_row(std::span<const int>(features.data() + r * n_cols, n_cols),
                   rng.next_bernoulli(0.5), static_cast<Minutes>(r), "p");
  }

  const std::size_t max_pairs = n_cols * (n_cols - 1) / 2;
  const double serial_scan = time_best_of(3, [&] {
    rank_interactions_serial(features, n_rows, n_cols, levels, residuals, max_pairs);
  });
  const double parallel_scan = time_best_of(3, [&] {
    rank_interactions(features, n_rows, n_cols, levels, residuals, max_pairs);
  });
  std::printf("FAST pair scan (%zu pairs)\n", max_pairs);
  std::printf("  serial   %8.3f ms\n", serial_scan * 1e3);
  std::printf("  parallel %8.3f ms   speedup %.2fx\n\n", parallel_scan * 1e3,
              serial_scan / parallel_scan);

  std::vector<FeatureSpec> specs;
  for (std::size_t f = 0; f < n_cols; ++f) {
    specs.push_back({"f" + std::to_string(f), FeatureKind::Ordinal, 6, {}, false});
  }
  EbmConfig cfg;
  cfg.n_rounds = 30;
  cfg.n_interactions = 3;
  cfg.interaction_rounds = 10;
  cfg.validation_frac = 0.0;
  const EbmModel model = fit_ebm(set, SchemaView::from(specs), cfg);

  const double serial_predict = time_best_of(3, [&] { predict_scores_serial(model, set); });
  const double parallel_predict = time_best_of(3, [&] { predict_scores(model, set); });
  std::printf("batch prediction (%zu rows)\n", n_rows);
  std::printf("  serial   %8.3f ms\n", serial_predict * 1e3);
  std::printf("  parallel %8.3f ms   speedup %.2fx\n", parallel_predict * 1e3,
              serial_predict / parallel_predict);
  return 0;
}
