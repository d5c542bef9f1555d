// emakit: synthetic EMA study generation, preparation, model fitting, and
// the idiographic/nomothetic experiment harness.
//
// Verbs: generate, prep, fit, experiment, grid, inspect.
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 run finished
// with partial failures.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "emakit/csv_io.hpp"
#include "emakit/errors.hpp"
#include "emakit/experiment.hpp"
#include "emakit/model_io.hpp"
#include "emakit/report.hpp"
#include "emakit/version.hpp"

namespace fs = std::filesystem;
using namespace emakit;

namespace {

struct CommonOverrides {
  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int ebm_rounds = 0;
  int cv_k = 0;
  std::vector<std::string> regimes;
  bool no_models = false;
};

void add_override_flags(CLI::App* cmd, CommonOverrides& over) {
  cmd->add_option("--config", over.config_path, "experiment config file (JSON)");
  cmd->add_option("--out", over.output_dir, "output directory")
      ->envname("EMAKIT_OUTPUT_DIR");
  cmd->add_option("--seed", over.seed, "master seed")->each([&](const std::string&) {
    over.seed_set = true;
  });
  cmd->add_option("--ebm-rounds", over.ebm_rounds, "boosting rounds for EBM fits");
  cmd->add_option("--cv-k", over.cv_k, "expanding-window CV folds");
  cmd->add_option("--regimes", over.regimes,
                  "regimes to run (idiographic_ebm idiographic_logreg nomothetic_pooled "
                  "nomothetic_distill)");
  cmd->add_flag("--no-models", over.no_models, "skip writing model documents");
}

ExperimentConfig resolve_config(const CommonOverrides& over) {
  ExperimentConfig config;
  if (!over.config_path.empty()) {
    config = load_experiment_config(over.config_path);
  } else {
    config.synthetic = SynthConfig{};
  }
  if (over.seed_set) {
    config.seed = over.seed;
    if (config.synthetic) config.synthetic->seed = over.seed;
  }
  if (!over.output_dir.empty()) config.output_dir = over.output_dir;
  if (over.ebm_rounds > 0) config.ebm.n_rounds = over.ebm_rounds;
  if (over.cv_k > 0) config.cv_k = over.cv_k;
  if (!over.regimes.empty()) {
    config.regimes.clear();
    for (const auto& name : over.regimes) config.regimes.push_back(regime_from_name(name));
  }
  if (over.no_models) config.write_models = false;
  return config;
}

int report_result(const ExperimentResult& result) {
  for (const auto& [name, report] : result.reports) {
    std::printf("%-20s mean AUC %.3f (%.3f) over %zu individuals\n", name.c_str(),
                report.aggregate.mean, report.aggregate.stddev, report.aggregate.n_defined);
  }
  if (!result.failures.empty()) {
    std::fprintf(stderr, "%zu partial failure(s); see manifest\n", result.failures.size());
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EMA study modeling toolkit"};
  app.set_version_flag("--version", kEmakitVersion);
  app.require_subcommand(1);

  // generate: synthetic study -> CSV + schema sidecar
  auto* generate = app.add_subcommand("generate", "generate a synthetic study as CSV");
  SynthConfig synth;
  std::string gen_data = "study.csv";
  std::string gen_schema;
  generate->add_option("--individuals", synth.n_individuals, "number of individuals");
  generate->add_option("--features", synth.n_features, "number of features");
  generate->add_option("--samples", synth.n_samples, "observations per individual");
  generate->add_option("--positive-frac", synth.positive_frac, "positive class fraction");
  generate->add_option("--label-noise", synth.label_noise_frac, "label noise fraction");
  generate->add_option("--feature-noise", synth.feature_noise_frac, "feature noise fraction");
  generate->add_option("--categorical-frac", synth.categorical_frac, "categorical share");
  generate->add_option("--main-effects", synth.ground_truth.n_main_effects, "ground-truth mains");
  generate->add_option("--interactions", synth.ground_truth.n_interactions,
                       "ground-truth pairs");
  generate->add_option("--interaction-weight", synth.ground_truth.interaction_weight,
                       "pair term weight");
  generate->add_option("--jitter", synth.ground_truth.coefficient_jitter,
                       "per-individual coefficient jitter");
  generate->add_option("--seed", synth.seed, "generation seed");
  generate->add_option("--data", gen_data, "output CSV path");
  generate->add_option("--schema", gen_schema, "output schema path (default <data>.schema.json)");

  // prep: CSV -> supervised train/test CSVs + exclusion report
  auto* prep = app.add_subcommand("prep", "prepare a CSV study into supervised splits");
  std::string prep_data, prep_schema, prep_out = "prep_out";
  std::string prep_rule = "current_row";
  double prep_threshold = 0.5;
  std::vector<std::string> prep_positive;
  long prep_gap = 120;
  FilterParams prep_params;
  prep->add_option("--data", prep_data, "input CSV")->required();
  prep->add_option("--schema", prep_schema, "schema sidecar")->required();
  prep->add_option("--out", prep_out, "output directory")->envname("EMAKIT_OUTPUT_DIR");
  prep->add_option("--rule", prep_rule,
                   "outcome rule: current_row | next_point_threshold | next_point_categories");
  prep->add_option("--threshold", prep_threshold, "threshold for threshold rules");
  prep->add_option("--positive", prep_positive, "positive categories for the category rule");
  prep->add_option("--max-gap", prep_gap, "successor window in minutes");
  prep->add_option("--min-daily-obs", prep_params.min_daily_obs, "daily observation threshold");
  prep->add_option("--min-total-rows", prep_params.min_total_rows, "total row threshold");
  prep->add_option("--min-minority", prep_params.min_minority, "training minority threshold");
  prep->add_option("--train-frac", prep_params.train_frac, "sequential split fraction");

  // fit: one regime
  auto* fit = app.add_subcommand("fit", "run a single regime");
  CommonOverrides fit_over;
  std::string fit_regime = "idiographic_ebm";
  add_override_flags(fit, fit_over);
  fit->add_option("--regime", fit_regime, "regime to run")->required();

  // experiment: full run
  auto* experiment = app.add_subcommand("experiment", "run the configured experiment");
  CommonOverrides exp_over;
  add_override_flags(experiment, exp_over);

  // grid: the 15-cell synthetic sweep
  auto* grid = app.add_subcommand("grid", "synthetic sweep over users/features/samples");
  CommonOverrides grid_over;
  add_override_flags(grid, grid_over);

  // inspect: model document -> shape-function export
  auto* inspect = app.add_subcommand("inspect", "export shape functions from a model document");
  std::string inspect_model, inspect_out = "shapes.csv";
  inspect->add_option("--model", inspect_model, "model document (JSON)")->required();
  inspect->add_option("--out", inspect_out, "shape CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) {
      if (gen_schema.empty()) gen_schema = gen_data + ".schema.json";
      const Study study = generate_study(synth);
      if (const auto parent = fs::path(gen_data).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
      }
      save_study(study, gen_data, gen_schema);
      std::printf("wrote %s and %s (%d individuals x %d samples x %d features)\n",
                  gen_data.c_str(), gen_schema.c_str(), synth.n_individuals, synth.n_samples,
                  synth.n_features);
      return 0;
    }

    if (prep->parsed()) {
      OutcomeRule rule;
      if (prep_rule == "current_row") {
        rule.mode = OutcomeMode::CurrentRow;
        rule.threshold = prep_threshold;
      } else if (prep_rule == "next_point_threshold") {
        rule.mode = OutcomeMode::NextPointThreshold;
        rule.threshold = prep_threshold;
      } else if (prep_rule == "next_point_categories") {
        rule.mode = OutcomeMode::NextPointCategories;
        rule.positive_categories.insert(prep_positive.begin(), prep_positive.end());
      } else {
        throw ConfigError("unknown outcome rule '" + prep_rule + "'");
      }

      const Study raw = load_study(prep_data, prep_schema);
      const Study labeled = label_study(raw, rule, prep_gap);
      const FilterResult filtered = filter_individuals(labeled, prep_params);
      const SchemaView schema = SchemaView::from(filtered.study.schema);

      fs::create_directories(prep_out);
      SupervisedSet train_all, test_all;
      train_all.n_cols = schema.n_features();
      test_all.n_cols = schema.n_features();
      std::size_t unsplittable = 0;
      for (const auto& series : filtered.study.individuals) {
        const auto split = sequential_split(to_supervised(series), prep_params.train_frac);
        if (!split) {
          ++unsplittable;
          continue;
        }
        for (std::size_t r = 0; r < split->train.n_rows(); ++r) {
          train_all.append_row(split->train.row(r), split->train.labels[r],
                               split->train.row_timestamps[r], series.individual_id);
        }
        for (std::size_t r = 0; r < split->test.n_rows(); ++r) {
          test_all.append_row(split->test.row(r), split->test.labels[r],
                              split->test.row_timestamps[r], series.individual_id);
        }
      }
      save_supervised_csv(train_all, schema, (fs::path(prep_out) / "train.csv").string());
      save_supervised_csv(test_all, schema, (fs::path(prep_out) / "test.csv").string());
      {
        std::ofstream out(fs::path(prep_out) / "exclusions.csv");
        out << "individual_id,reasons,daily_obs,total_rows,minority_train\n";
        char buf[32];
        for (const auto& e : filtered.exclusions) {
          std::snprintf(buf, sizeof(buf), "%.4f", e.daily_obs);
          out << e.individual_id << ",";
          for (std::size_t i = 0; i < e.reasons.size(); ++i) {
            if (i > 0) out << ";";
            out << e.reasons[i];
          }
          out << "," << buf << "," << e.total_rows << "," << e.minority_train << "\n";
        }
      }
      std::printf("prepared %zu individuals (%zu excluded, %zu unsplittable)\n",
                  filtered.study.individuals.size() - unsplittable, filtered.exclusions.size(),
                  unsplittable);
      if (filtered.empty_study()) {
        std::fprintf(stderr, "every individual was excluded\n");
        return 2;
      }
      return 0;
    }

    if (fit->parsed()) {
      ExperimentConfig config = resolve_config(fit_over);
      config.regimes = {regime_from_name(fit_regime)};
      config.validate();
      return report_result(run_experiment(config));
    }

    if (experiment->parsed()) {
      ExperimentConfig config = resolve_config(exp_over);
      config.validate();
      return report_result(run_experiment(config));
    }

    if (grid->parsed()) {
      ExperimentConfig config = resolve_config(grid_over);
      if (!config.synthetic) throw ConfigError("grid requires a synthetic source");
      config.validate();
      const GridSummary summary = run_synthetic_grid(config);
      std::size_t failed = 0;
      for (const auto& row : summary.rows) {
        std::printf("%3d %2d %3d  %-20s %s\n", row.n_individuals, row.n_features, row.n_samples,
                    row.method.c_str(), row.formatted.c_str());
        failed += row.failed ? 1 : 0;
      }
      std::printf("summary written to %s\n", summary.summary_path.c_str());
      return failed == 0 ? 0 : 3;
    }

    if (inspect->parsed()) {
      const auto doc = load_model_file(inspect_model);
      if (doc.value("kind", std::string{}) != "ebm") {
        throw DataError("inspect expects an EBM model document");
      }
      const EbmModel model = ebm_from_json(doc);
      save_shape_csv(model, inspect_out);
      std::printf("wrote %s (%zu main terms, %zu pair terms)\n", inspect_out.c_str(),
                  model.main_terms.size(), model.pair_terms.size());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
