#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emakit/ebm.hpp"
#include "emakit/gridsearch.hpp"
#include "emakit/metrics.hpp"
#include "emakit/types.hpp"

namespace emakit {

// An individual's training rows paired with teacher-derived soft
// probabilities (positive class). Targets are strictly inside (0, 1).
struct SoftLabelSet {
  std::size_t n_cols = 0;
  std::vector<int> features;  // row-major copy of the training rows
  std::vector<double> soft_targets;
  double temperature = 1.0;
  std::string teacher_fingerprint;

  std::size_t n_rows() const { return soft_targets.size(); }
};

// Two-class temperature softmax collapses to sigma(logit / T).
double temperature_soften(double logit, double temperature);  // throws ConfigError on T <= 0

// Soft targets from a logistic-link teacher; hard labels are discarded.
// Throws DataError on schema-fingerprint mismatch.
SoftLabelSet build_soft_dataset(const EbmModel& teacher, const SupervisedSet& individual_train,
                                double temperature, const SchemaView& schema);

// Regression student on soft targets; config.link must be Identity. The raw
// student scores serve directly as ranking scores for AUC.
EbmModel fit_student(const SoftLabelSet& soft, const SchemaView& schema, const EbmConfig& config);

struct TemperatureGridResult {
  bool infeasible = false;
  std::vector<double> candidates;
  std::vector<CvScore> table;
  std::size_t best_index = 0;
  double best_temperature = 1.0;
  double best_cv_auc = 0.0;
};

// Selects T by expanding-window CV on the individual's training rows, with
// the hard labels as CV ground truth.
TemperatureGridResult grid_search_temperature(const SupervisedSet& train,
                                              const SchemaView& schema, const EbmModel& teacher,
                                              const EbmConfig& student_config,
                                              const std::vector<double>& temperature_grid,
                                              int cv_k);

struct PreparedIndividual {
  std::string id;
  SupervisedSet train;
  SupervisedSet test;
};

struct DistillRecord {
  std::string individual_id;
  double temperature = 1.0;
  double cv_auc = 0.0;
  std::optional<double> test_auc;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  bool selected = false;
};

struct DistillResult {
  std::vector<DistillRecord> records;        // one row per (individual, T)
  std::vector<IndividualScore> test_scores;  // CV-selected student per individual
  std::vector<std::string> skipped;          // CV-infeasible individuals, reported not dropped
  std::vector<std::pair<std::string, EbmModel>> students;  // selected models
};

// Per individual: soft datasets per T, students fitted per T, temperature
// selected by CV, selected student evaluated on the untouched test set.
// Individuals run independently and in parallel.
DistillResult run_distillation(const std::vector<PreparedIndividual>& individuals,
                               const SchemaView& schema, const EbmModel& teacher,
                               const EbmConfig& student_config,
                               const std::vector<double>& temperature_grid, int cv_k);

}  // namespace emakit
