#include "emakit/distill.hpp"

#include <cmath>

#include "emakit/errors.hpp"
#include "emakit/model_io.hpp"

namespace emakit {

double temperature_soften(double logit, double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("temperature_soften: T must be positive");
  return sigmoid(logit / temperature);
}

SoftLabelSet build_soft_dataset(const EbmModel& teacher, const SupervisedSet& individual_train,
                                double temperature, const SchemaView& schema) {
  if (!(temperature > 0.0)) throw ConfigError("build_soft_dataset: T must be positive");
  if (teacher.link != LinkKind::Logistic) {
    throw ConfigError("build_soft_dataset: teacher must use the logistic link");
  }
  if (teacher.schema_fingerprint != schema.fingerprint) {
    throw DataError("build_soft_dataset: teacher schema fingerprint mismatch");
  }
  if (individual_train.n_cols != schema.n_features()) {
    throw DataError("build_soft_dataset: row width does not match schema");
  }

  SoftLabelSet soft;
  soft.n_cols = individual_train.n_cols;
  soft.features = individual_train.features;
  soft.temperature = temperature;
  soft.teacher_fingerprint = model_fingerprint(teacher);
  soft.soft_targets.reserve(individual_train.n_rows());
  for (std::size_t r = 0; r < individual_train.n_rows(); ++r) {
    soft.soft_targets.push_back(
        temperature_soften(predict_score(teacher, individual_train.row(r)), temperature));
  }
  return soft;
}

EbmModel fit_student(const SoftLabelSet& soft, const SchemaView& schema, const EbmConfig& config) {
  if (config.link != LinkKind::Identity) {
    throw ConfigError("fit_student: student config must use the identity link");
  }
  return fit_ebm_regression(soft.features, soft.n_rows(), schema, soft.soft_targets, config);
}

TemperatureGridResult grid_search_temperature(const SupervisedSet& train,
                                              const SchemaView& schema, const EbmModel& teacher,
                                              const EbmConfig& student_config,
                                              const std::vector<double>& temperature_grid,
                                              int cv_k) {
  if (temperature_grid.empty()) throw ConfigError("grid_search_temperature: empty grid");
  TemperatureGridResult result;
  result.candidates = temperature_grid;
  double best = -1.0;
  for (std::size_t c = 0; c < temperature_grid.size(); ++c) {
    const double t = temperature_grid[c];
    const auto cv = cv_score(train, cv_k, [&](const SupervisedSet& tr, const SupervisedSet& te) {
      const SoftLabelSet soft = build_soft_dataset(teacher, tr, t, schema);
      const EbmModel student = fit_student(soft, schema, student_config);
      return predict_scores(student, te);
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
  result.best_temperature = temperature_grid[result.best_index];
  result.best_cv_auc = best;
  return result;
}

DistillResult run_distillation(const std::vector<PreparedIndividual>& individuals,
                               const SchemaView& schema, const EbmModel& teacher,
                               const EbmConfig& student_config,
                               const std::vector<double>& temperature_grid, int cv_k) {
  if (temperature_grid.empty()) throw ConfigError("run_distillation: empty temperature grid");

  struct Slot {
    bool skipped = false;
    std::vector<DistillRecord> records;
    IndividualScore score;
    EbmModel student;
  };
  std::vector<Slot> slots(individuals.size());

  const auto n = static_cast<std::ptrdiff_t>(individuals.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < n; ++idx) {
    const auto& person = individuals[static_cast<std::size_t>(idx)];
    Slot& slot = slots[static_cast<std::size_t>(idx)];
    slot.score.id = person.id;

    const TemperatureGridResult grid = grid_search_temperature(
        person.train, schema, teacher, student_config, temperature_grid, cv_k);
    if (grid.infeasible) {
      slot.skipped = true;
      continue;
    }

    for (std::size_t c = 0; c < grid.candidates.size(); ++c) {
      const double t = grid.candidates[c];
      const SoftLabelSet soft = build_soft_dataset(teacher, person.train, t, schema);
      const EbmModel student = fit_student(soft, schema, student_config);
      const std::vector<double> preds = predict_scores(student, person.test);
      DistillRecord record;
      record.individual_id = person.id;
      record.temperature = t;
      record.cv_auc = grid.table[c].mean_auc;
      record.test_auc =
          person.test.n_rows() > 0 ? roc_auc(person.test.labels, preds) : std::nullopt;
      record.n_train = person.train.n_rows();
      record.n_test = person.test.n_rows();
      record.selected = c == grid.best_index;
      if (record.selected) {
        slot.score.auc = record.test_auc;
        slot.student = student;
      }
      slot.records.push_back(std::move(record));
    }
  }

  DistillResult result;
  for (auto& slot : slots) {
    if (slot.skipped) {
      result.skipped.push_back(slot.score.id);
      continue;
    }
    for (auto& record : slot.records) result.records.push_back(std::move(record));
    result.test_scores.push_back(slot.score);
    result.students.emplace_back(slot.score.id, std::move(slot.student));
  }
  return result;
}

}  // namespace emakit
