#include "emakit/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "emakit/csv_io.hpp"
#include "emakit/errors.hpp"
#include "emakit/gridsearch.hpp"
#include "emakit/model_io.hpp"
#include "emakit/report.hpp"
#include "emakit/rng.hpp"
#include "emakit/version.hpp"

namespace emakit {

namespace fs = std::filesystem;
using nlohmann::json;

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::IdiographicEbm: return "idiographic_ebm";
    case Regime::IdiographicLogReg: return "idiographic_logreg";
    case Regime::NomotheticPooled: return "nomothetic_pooled";
    case Regime::NomotheticDistill: return "nomothetic_distill";
  }
  throw ConfigError("unknown regime");
}

Regime regime_from_name(const std::string& name) {
  if (name == "idiographic_ebm") return Regime::IdiographicEbm;
  if (name == "idiographic_logreg") return Regime::IdiographicLogReg;
  if (name == "nomothetic_pooled") return Regime::NomotheticPooled;
  if (name == "nomothetic_distill") return Regime::NomotheticDistill;
  throw ConfigError("unknown regime '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (regimes.empty()) throw ConfigError("experiment: at least one regime required");
  if (synthetic.has_value() == csv.has_value()) {
    throw ConfigError("experiment: exactly one of synthetic or csv source required");
  }
  if (synthetic) synthetic->validate();
  if (cv_k < 1) throw ConfigError("experiment: cv_k must be >= 1");
  if (interaction_grid.empty()) throw ConfigError("experiment: empty interaction grid");
  if (l2_grid.empty()) throw ConfigError("experiment: empty l2 grid");
  if (temperature_grid.empty()) throw ConfigError("experiment: empty temperature grid");
  for (double t : temperature_grid) {
    if (!(t > 0.0)) throw ConfigError("experiment: temperatures must be positive");
  }
  if (output_dir.empty()) throw ConfigError("experiment: output_dir required");
}

namespace {

json synth_to_json(const SynthConfig& s) {
  return json{{"n_individuals", s.n_individuals},
              {"n_features", s.n_features},
              {"n_samples", s.n_samples},
              {"positive_frac", s.positive_frac},
              {"label_noise_frac", s.label_noise_frac},
              {"feature_noise_frac", s.feature_noise_frac},
              {"categorical_frac", s.categorical_frac},
              {"ordinal_levels", s.ordinal_levels},
              {"ground_truth",
               json{{"n_main_effects", s.ground_truth.n_main_effects},
                    {"n_interactions", s.ground_truth.n_interactions},
                    {"interaction_weight", s.ground_truth.interaction_weight},
                    {"coefficient_jitter", s.ground_truth.coefficient_jitter}}},
              {"seed", s.seed}};
}

SynthConfig synth_from_json(const json& j, std::uint64_t default_seed) {
  SynthConfig s;
  s.n_individuals = j.value("n_individuals", s.n_individuals);
  s.n_features = j.value("n_features", s.n_features);
  s.n_samples = j.value("n_samples", s.n_samples);
  s.positive_frac = j.value("positive_frac", s.positive_frac);
  s.label_noise_frac = j.value("label_noise_frac", s.label_noise_frac);
  s.feature_noise_frac = j.value("feature_noise_frac", s.feature_noise_frac);
  s.categorical_frac = j.value("categorical_frac", s.categorical_frac);
  s.ordinal_levels = j.value("ordinal_levels", s.ordinal_levels);
  if (j.contains("ground_truth")) {
    const auto& g = j["ground_truth"];
    s.ground_truth.n_main_effects = g.value("n_main_effects", s.ground_truth.n_main_effects);
    s.ground_truth.n_interactions = g.value("n_interactions", s.ground_truth.n_interactions);
    s.ground_truth.interaction_weight =
        g.value("interaction_weight", s.ground_truth.interaction_weight);
    s.ground_truth.coefficient_jitter =
        g.value("coefficient_jitter", s.ground_truth.coefficient_jitter);
  }
  s.seed = j.value("seed", default_seed);
  return s;
}

json outcome_rule_to_json(const OutcomeRule& rule) {
  json j;
  switch (rule.mode) {
    case OutcomeMode::CurrentRow:
      j["mode"] = "current_row";
      j["threshold"] = rule.threshold;
      break;
    case OutcomeMode::NextPointThreshold:
      j["mode"] = "next_point_threshold";
      j["threshold"] = rule.threshold;
      break;
    case OutcomeMode::NextPointCategories:
      j["mode"] = "next_point_categories";
      j["positive"] = rule.positive_categories;
      break;
  }
  return j;
}

OutcomeRule outcome_rule_from_json(const json& j) {
  OutcomeRule rule;
  const std::string mode = j.value("mode", "current_row");
  if (mode == "current_row") {
    rule.mode = OutcomeMode::CurrentRow;
    rule.threshold = j.value("threshold", 0.5);
  } else if (mode == "next_point_threshold") {
    rule.mode = OutcomeMode::NextPointThreshold;
    rule.threshold = j.at("threshold").get<double>();
  } else if (mode == "next_point_categories") {
    rule.mode = OutcomeMode::NextPointCategories;
    for (const auto& c : j.at("positive")) {
      rule.positive_categories.insert(c.get<std::string>());
    }
  } else {
    throw ConfigError("outcome_rule: unknown mode '" + mode + "'");
  }
  return rule;
}

std::string link_name(LinkKind link) { return link == LinkKind::Logistic ? "logistic" : "identity"; }

json ebm_config_to_json(const EbmConfig& e) {
  return json{{"n_rounds", e.n_rounds},
              {"learning_rate", e.learning_rate},
              {"max_leaves", e.max_leaves},
              {"n_interactions", e.n_interactions},
              {"interaction_rounds", e.interaction_rounds},
              {"link", link_name(e.link)},
              {"min_samples_leaf", e.min_samples_leaf},
              {"validation_frac", e.validation_frac},
              {"early_stop_patience", e.early_stop_patience},
              {"seed", e.seed}};
}

EbmConfig ebm_config_from_json(const json& j) {
  EbmConfig e;
  e.n_rounds = j.value("n_rounds", e.n_rounds);
  e.learning_rate = j.value("learning_rate", e.learning_rate);
  e.max_leaves = j.value("max_leaves", e.max_leaves);
  e.n_interactions = j.value("n_interactions", e.n_interactions);
  e.interaction_rounds = j.value("interaction_rounds", e.interaction_rounds);
  if (j.contains("link")) {
    const std::string link = j["link"].get<std::string>();
    if (link == "logistic") {
      e.link = LinkKind::Logistic;
    } else if (link == "identity") {
      e.link = LinkKind::Identity;
    } else {
      throw ConfigError("ebm config: unknown link '" + link + "'");
    }
  }
  e.min_samples_leaf = j.value("min_samples_leaf", e.min_samples_leaf);
  e.validation_frac = j.value("validation_frac", e.validation_frac);
  e.early_stop_patience = j.value("early_stop_patience", e.early_stop_patience);
  e.seed = j.value("seed", e.seed);
  return e;
}

}  // namespace

json experiment_config_to_json(const ExperimentConfig& config) {
  json doc;
  if (config.synthetic) {
    doc["source"]["synthetic"] = synth_to_json(*config.synthetic);
  }
  if (config.csv) {
    doc["source"]["csv"] = json{{"data", config.csv->data_path},
                                {"schema", config.csv->schema_path},
                                {"outcome_rule", outcome_rule_to_json(config.csv->outcome_rule)},
                                {"max_gap_minutes", config.csv->max_gap_minutes}};
  }
  doc["prep"] = json{{"min_daily_obs", config.prep.min_daily_obs},
                     {"min_total_rows", config.prep.min_total_rows},
                     {"min_minority", config.prep.min_minority},
                     {"train_frac", config.prep.train_frac}};
  doc["regimes"] = json::array();
  for (Regime r : config.regimes) doc["regimes"].push_back(regime_name(r));
  doc["ebm"] = ebm_config_to_json(config.ebm);
  doc["grids"] = json{{"n_interactions", config.interaction_grid},
                      {"l2", config.l2_grid},
                      {"temperatures", config.temperature_grid}};
  doc["logreg"] = json{{"max_iter", config.logreg_max_iter}, {"tol", config.logreg_tol}};
  doc["cv_k"] = config.cv_k;
  doc["output_dir"] = config.output_dir;
  doc["seed"] = config.seed;
  doc["write_models"] = config.write_models;
  return doc;
}

ExperimentConfig experiment_config_from_json(const json& doc) {
  ExperimentConfig config;
  config.seed = doc.value("seed", config.seed);
  if (doc.contains("source")) {
    const auto& source = doc["source"];
    if (source.contains("synthetic") && source.contains("csv")) {
      throw ConfigError("experiment config: both synthetic and csv sources given");
    }
    if (source.contains("synthetic")) {
      config.synthetic = synth_from_json(source["synthetic"], config.seed);
    } else if (source.contains("csv")) {
      CsvSource csv;
      csv.data_path = source["csv"].at("data").get<std::string>();
      csv.schema_path = source["csv"].at("schema").get<std::string>();
      if (source["csv"].contains("outcome_rule")) {
        csv.outcome_rule = outcome_rule_from_json(source["csv"]["outcome_rule"]);
      }
      csv.max_gap_minutes = source["csv"].value("max_gap_minutes", csv.max_gap_minutes);
      config.csv = std::move(csv);
    }
  }
  if (doc.contains("prep")) {
    const auto& p = doc["prep"];
    config.prep.min_daily_obs = p.value("min_daily_obs", config.prep.min_daily_obs);
    config.prep.min_total_rows = p.value("min_total_rows", config.prep.min_total_rows);
    config.prep.min_minority = p.value("min_minority", config.prep.min_minority);
    config.prep.train_frac = p.value("train_frac", config.prep.train_frac);
  }
  if (doc.contains("regimes")) {
    config.regimes.clear();
    for (const auto& r : doc["regimes"]) config.regimes.push_back(regime_from_name(r));
  }
  if (doc.contains("ebm")) config.ebm = ebm_config_from_json(doc["ebm"]);
  if (doc.contains("grids")) {
    const auto& g = doc["grids"];
    if (g.contains("n_interactions")) {
      config.interaction_grid = g["n_interactions"].get<std::vector<int>>();
    }
    if (g.contains("l2")) config.l2_grid = g["l2"].get<std::vector<double>>();
    if (g.contains("temperatures")) {
      config.temperature_grid = g["temperatures"].get<std::vector<double>>();
    }
  }
  if (doc.contains("logreg")) {
    config.logreg_max_iter = doc["logreg"].value("max_iter", config.logreg_max_iter);
    config.logreg_tol = doc["logreg"].value("tol", config.logreg_tol);
  }
  config.cv_k = doc.value("cv_k", config.cv_k);
  config.output_dir = doc.value("output_dir", config.output_dir);
  config.write_models = doc.value("write_models", config.write_models);
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return experiment_config_from_json(doc);
}

namespace {

struct PreparedStudy {
  SchemaView schema;
  std::vector<PreparedIndividual> individuals;
  std::vector<Exclusion> exclusions;
  std::vector<RegimeFailure> prep_failures;
};

PreparedStudy prepare(const ExperimentConfig& config) {
  Study labeled;
  if (config.synthetic) {
    labeled = generate_study(*config.synthetic);
  } else {
    const Study raw = load_study(config.csv->data_path, config.csv->schema_path);
    labeled = label_study(raw, config.csv->outcome_rule, config.csv->max_gap_minutes);
  }

  FilterResult filtered = filter_individuals(labeled, config.prep);
  PreparedStudy prepared;
  prepared.schema = SchemaView::from(filtered.study.schema);
  prepared.exclusions = std::move(filtered.exclusions);
  for (const auto& series : filtered.study.individuals) {
    const SupervisedSet set = to_supervised(series);
    const auto split = sequential_split(set, config.prep.train_frac);
    if (!split) {
      prepared.prep_failures.push_back(
          {"prep", series.individual_id, "sequential split impossible (too few rows)"});
      continue;
    }
    prepared.individuals.push_back({series.individual_id, split->train, split->test});
  }
  return prepared;
}

EvalReport make_report(const std::string& method, std::vector<IndividualScore> scores,
                       const EvalReport* baseline) {
  EvalReport report;
  report.method = method;
  report.per_individual = std::move(scores);
  report.aggregate = aggregate_scores(report.per_individual,
                                      baseline != nullptr ? &baseline->per_individual : nullptr);
  return report;
}

struct PooledFit {
  EbmModel model;
  int best_interactions = 0;
  bool ok = false;
  std::string error;
};

PooledFit fit_pooled(const ExperimentConfig& config, const PreparedStudy& prepared) {
  PooledFit outcome;
  std::vector<std::pair<std::string, const SupervisedSet*>> train_sets;
  train_sets.reserve(prepared.individuals.size());
  for (const auto& person : prepared.individuals) {
    train_sets.emplace_back(person.id, &person.train);
  }
  try {
    const SupervisedSet pooled = pool_training_sets(train_sets);
    if (pooled.n_rows() == 0) throw DataError("pooled training set is empty");
    const EbmGridResult grid =
        grid_search_ebm(pooled, prepared.schema, config.ebm, config.interaction_grid, config.cv_k);
    if (grid.infeasible) throw DataError("pooled grid search is CV-infeasible");
    EbmConfig cfg = config.ebm;
    cfg.n_interactions = grid.best_n_interactions;
    outcome.model = fit_ebm(pooled, prepared.schema, cfg);
    outcome.best_interactions = grid.best_n_interactions;
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;

  const fs::path out_dir(config.output_dir);
  const fs::path reports_dir = out_dir / "reports";
  const fs::path models_dir = out_dir / "models";
  fs::create_directories(reports_dir);
  if (config.write_models) fs::create_directories(models_dir);

  PreparedStudy prepared = prepare(config);
  result.exclusions = prepared.exclusions;
  for (const auto& failure : prepared.prep_failures) result.failures.push_back(failure);

  std::map<std::string, double> timings_ms;
  const auto run_timed = [&](const std::string& name, const auto& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    timings_ms[name] =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start)
            .count();
  };

  const auto want = [&](Regime r) {
    for (Regime x : config.regimes) {
      if (x == r) return true;
    }
    return false;
  };

  if (prepared.individuals.empty()) {
    result.failures.push_back({"prep", "", "no individuals survive preparation"});
  }

  const SchemaView& schema = prepared.schema;
  const auto n_people = static_cast<std::ptrdiff_t>(prepared.individuals.size());
  PooledFit pooled_fit;
  bool pooled_fit_ready = false;

  // Idiographic EBM: per-individual interaction-count grid search.
  if (want(Regime::IdiographicEbm) && !prepared.individuals.empty()) {
    const std::string name = regime_name(Regime::IdiographicEbm);
    run_timed(name, [&] {
      struct Slot {
        IndividualScore score;
        bool infeasible = false;
        std::string error;
        json model_doc;
      };
      std::vector<Slot> slots(prepared.individuals.size());
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < n_people; ++i) {
        const auto& person = prepared.individuals[static_cast<std::size_t>(i)];
        Slot& slot = slots[static_cast<std::size_t>(i)];
        slot.score.id = person.id;
        try {
          const EbmGridResult grid = grid_search_ebm(person.train, schema, config.ebm,
                                                     config.interaction_grid, config.cv_k);
          if (grid.infeasible) {
            slot.infeasible = true;
            continue;
          }
          EbmConfig cfg = config.ebm;
          cfg.n_interactions = grid.best_n_interactions;
          const EbmModel model = fit_ebm(person.train, schema, cfg);
          slot.score.auc = roc_auc(person.test.labels, predict_scores(model, person.test));
          if (config.write_models) slot.model_doc = ebm_to_json(model);
        } catch (const std::exception& e) {
          slot.error = e.what();
        }
      }
      std::vector<IndividualScore> scores;
      for (auto& slot : slots) {
        if (slot.infeasible) {
          result.cv_infeasible[name].push_back(slot.score.id);
        } else if (!slot.error.empty()) {
          result.failures.push_back({name, slot.score.id, slot.error});
        } else {
          scores.push_back(slot.score);
          if (config.write_models) {
            fs::create_directories(models_dir / name);
            save_model_file(slot.model_doc, (models_dir / name / (slot.score.id + ".json")).string());
          }
        }
      }
      if (!scores.empty()) {
        result.reports[name] = make_report(name, std::move(scores), nullptr);
      } else {
        result.failures.push_back({name, "", "no individual produced a model"});
      }
    });
  }

  // Idiographic logistic regression baseline.
  if (want(Regime::IdiographicLogReg) && !prepared.individuals.empty()) {
    const std::string name = regime_name(Regime::IdiographicLogReg);
    run_timed(name, [&] {
      struct Slot {
        IndividualScore score;
        bool infeasible = false;
        std::string error;
        json model_doc;
      };
      std::vector<Slot> slots(prepared.individuals.size());
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < n_people; ++i) {
        const auto& person = prepared.individuals[static_cast<std::size_t>(i)];
        Slot& slot = slots[static_cast<std::size_t>(i)];
        slot.score.id = person.id;
        try {
          const LogRegGridResult grid =
              grid_search_logreg(person.train, schema, config.l2_grid, config.cv_k,
                                 config.logreg_max_iter, config.logreg_tol);
          if (grid.infeasible) {
            slot.infeasible = true;
            continue;
          }
          const LinearModel model = fit_logreg(person.train, schema, grid.best_l2,
                                               config.logreg_max_iter, config.logreg_tol);
          slot.score.auc = roc_auc(person.test.labels, predict_linear_batch(model, person.test));
          if (config.write_models) slot.model_doc = linear_to_json(model);
        } catch (const std::exception& e) {
          slot.error = e.what();
        }
      }
      std::vector<IndividualScore> scores;
      for (auto& slot : slots) {
        if (slot.infeasible) {
          result.cv_infeasible[name].push_back(slot.score.id);
        } else if (!slot.error.empty()) {
          result.failures.push_back({name, slot.score.id, slot.error});
        } else {
          scores.push_back(slot.score);
          if (config.write_models) {
            fs::create_directories(models_dir / name);
            save_model_file(slot.model_doc, (models_dir / name / (slot.score.id + ".json")).string());
          }
        }
      }
      if (!scores.empty()) {
        result.reports[name] = make_report(name, std::move(scores), nullptr);
      } else {
        result.failures.push_back({name, "", "no individual produced a model"});
      }
    });
  }

  const EvalReport* ebm_baseline = nullptr;
  if (const auto it = result.reports.find(regime_name(Regime::IdiographicEbm));
      it != result.reports.end()) {
    ebm_baseline = &it->second;
  }

  // Pooled nomothetic model, evaluated on each individual's test set.
  if (want(Regime::NomotheticPooled) && !prepared.individuals.empty()) {
    const std::string name = regime_name(Regime::NomotheticPooled);
    run_timed(name, [&] {
      pooled_fit = fit_pooled(config, prepared);
      pooled_fit_ready = true;
      if (!pooled_fit.ok) {
        result.failures.push_back({name, "", pooled_fit.error});
        return;
      }
      std::vector<IndividualScore> scores;
      for (const auto& person : prepared.individuals) {
        IndividualScore score;
        score.id = person.id;
        try {
          score.auc = roc_auc(person.test.labels, predict_scores(pooled_fit.model, person.test));
        } catch (const std::exception& e) {
          result.failures.push_back({name, person.id, e.what()});
          continue;
        }
        scores.push_back(std::move(score));
      }
      if (config.write_models) {
        save_model_file(ebm_to_json(pooled_fit.model), (models_dir / "ebm_all.json").string());
      }
      if (!scores.empty()) {
        result.reports[name] = make_report(name, std::move(scores), ebm_baseline);
      } else {
        result.failures.push_back({name, "", "no individual could be evaluated"});
      }
    });
  }

  // Knowledge distillation: pooled teacher, per-individual students.
  if (want(Regime::NomotheticDistill) && !prepared.individuals.empty()) {
    const std::string name = regime_name(Regime::NomotheticDistill);
    run_timed(name, [&] {
      if (!pooled_fit_ready) {
        pooled_fit = fit_pooled(config, prepared);
        pooled_fit_ready = true;
      }
      if (!pooled_fit.ok) {
        result.failures.push_back({name, "", "teacher unavailable: " + pooled_fit.error});
        return;
      }
      EbmConfig student_config = config.ebm;
      student_config.link = LinkKind::Identity;
      student_config.n_interactions = pooled_fit.best_interactions;
      try {
        DistillResult distilled =
            run_distillation(prepared.individuals, schema, pooled_fit.model, student_config,
                             config.temperature_grid, config.cv_k);
        result.distill_records = std::move(distilled.records);
        for (const auto& id : distilled.skipped) result.cv_infeasible[name].push_back(id);
        if (config.write_models) {
          fs::create_directories(models_dir / name);
          for (const auto& [id, student] : distilled.students) {
            save_model_file(ebm_to_json(student), (models_dir / name / (id + ".json")).string());
          }
        }
        if (!distilled.test_scores.empty()) {
          result.reports[name] = make_report(name, std::move(distilled.test_scores), ebm_baseline);
        } else {
          result.failures.push_back({name, "", "every individual was CV-infeasible"});
        }
      } catch (const std::exception& e) {
        result.failures.push_back({name, "", e.what()});
      }
    });
  }

  // Reports, exclusion table, manifest. Report files carry no timings so
  // reruns of one config are byte-identical.
  for (const auto& [name, report] : result.reports) {
    const fs::path per_path = reports_dir / (name + "_per_individual.csv");
    const fs::path agg_path = reports_dir / (name + "_aggregate.csv");
    write_per_individual_csv(report, per_path.string());
    write_aggregate_csv(report, agg_path.string());
    result.report_paths.push_back(per_path.string());
    result.report_paths.push_back(agg_path.string());
  }
  if (!result.distill_records.empty()) {
    const fs::path distill_path = reports_dir / "distill_report.csv";
    write_distill_csv(result.distill_records, distill_path.string());
    result.report_paths.push_back(distill_path.string());
  }
  {
    std::ofstream out(reports_dir / "exclusions.csv");
    out << "individual_id,reasons,daily_obs,total_rows,minority_train\n";
    char buf[32];
    for (const auto& e : result.exclusions) {
      std::snprintf(buf, sizeof(buf), "%.4f", e.daily_obs);
      out << e.individual_id << ",";
      for (std::size_t i = 0; i < e.reasons.size(); ++i) {
        if (i > 0) out << ";";
        out << e.reasons[i];
      }
      out << "," << buf << "," << e.total_rows << "," << e.minority_train << "\n";
    }
    result.report_paths.push_back((reports_dir / "exclusions.csv").string());
  }

  result.partial_failures = !result.failures.empty();

  json manifest;
  manifest["version"] = kEmakitVersion;
  manifest["seed"] = config.seed;
  manifest["config"] = experiment_config_to_json(config);
  manifest["n_individuals_prepared"] = prepared.individuals.size();
  manifest["exclusions"] = json::array();
  for (const auto& e : result.exclusions) {
    manifest["exclusions"].push_back(json{{"individual_id", e.individual_id},
                                          {"reasons", e.reasons},
                                          {"daily_obs", e.daily_obs},
                                          {"total_rows", e.total_rows},
                                          {"minority_train", e.minority_train}});
  }
  manifest["cv_infeasible"] = result.cv_infeasible;
  manifest["failures"] = json::array();
  for (const auto& f : result.failures) {
    manifest["failures"].push_back(
        json{{"regime", f.regime}, {"individual_id", f.individual_id}, {"message", f.message}});
  }
  manifest["timings_ms"] = timings_ms;
  manifest["reports"] = json::object();
  for (const auto& path : result.report_paths) {
    manifest["reports"][fs::path(path).filename().string()] = file_hash_hex(path);
  }
  const fs::path manifest_path = out_dir / "manifest.json";
  std::ofstream manifest_out(manifest_path);
  manifest_out << manifest.dump(2) << "\n";
  result.manifest_path = manifest_path.string();

  return result;
}

GridSummary run_synthetic_grid(const ExperimentConfig& base, const GridAxes& axes) {
  if (!base.synthetic) throw ConfigError("grid: synthetic source required");
  if (axes.individuals.empty() || axes.features.empty() || axes.samples.empty()) {
    throw ConfigError("grid: empty axis");
  }

  GridSummary summary;
  const fs::path out_dir(base.output_dir);
  fs::create_directories(out_dir);

  int cell_index = 0;
  for (int users : axes.individuals) {
    for (int features : axes.features) {
      for (int samples : axes.samples) {
        // The (60 features, 50 samples) column is not part of the sweep.
        if (features == 60 && samples == 50) continue;
        ++cell_index;

        ExperimentConfig cell = base;
        cell.synthetic->n_individuals = users;
        cell.synthetic->n_features = features;
        cell.synthetic->n_samples = samples;
        cell.synthetic->seed = Rng::derive(base.seed, static_cast<std::uint64_t>(cell_index));
        cell.write_models = false;
        char cell_name[48];
        std::snprintf(cell_name, sizeof(cell_name), "cell_u%03d_f%02d_s%03d", users, features,
                      samples);
        cell.output_dir = (out_dir / cell_name).string();

        std::map<std::string, std::pair<double, double>> cell_stats;
        bool failed = false;
        try {
          const ExperimentResult run = run_experiment(cell);
          for (const auto& [method, report] : run.reports) {
            cell_stats[method] = {report.aggregate.mean, report.aggregate.stddev};
          }
          if (run.reports.empty()) failed = true;
        } catch (const std::exception&) {
          failed = true;
        }

        for (Regime regime : base.regimes) {
          GridCellSummary row;
          row.n_individuals = users;
          row.n_features = features;
          row.n_samples = samples;
          row.method = regime_name(regime);
          const auto it = cell_stats.find(row.method);
          if (failed || it == cell_stats.end()) {
            row.failed = true;
            row.formatted = "FAILED";
          } else {
            row.mean = it->second.first;
            row.stddev = it->second.second;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f (%.3f)", row.mean, row.stddev);
            row.formatted = buf;
          }
          summary.rows.push_back(std::move(row));
        }
      }
    }
  }

  const fs::path summary_path = out_dir / "grid_summary.csv";
  std::ofstream out(summary_path);
  if (!out) throw DataError("cannot write grid summary");
  out << "users,features,samples,method,mean,std,formatted\n";
  char buf[32];
  for (const auto& row : summary.rows) {
    out << row.n_individuals << "," << row.n_features << "," << row.n_samples << ","
        << row.method << ",";
    if (row.failed) {
      out << ",,FAILED\n";
      continue;
    }
    std::snprintf(buf, sizeof(buf), "%.6f", row.mean);
    out << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.6f", row.stddev);
    out << buf << ",\"" << row.formatted << "\"\n";
  }
  summary.summary_path = summary_path.string();
  return summary;
}

}  // namespace emakit
