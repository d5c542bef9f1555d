#include "emakit/model_io.hpp"

#include <cstdio>
#include <fstream>

#include "emakit/errors.hpp"
#include "emakit/util.hpp"

namespace emakit {

namespace {

using nlohmann::json;

std::string link_to_string(LinkKind link) {
  return link == LinkKind::Logistic ? "logistic" : "identity";
}

LinkKind link_from_string(const std::string& text) {
  if (text == "logistic") return LinkKind::Logistic;
  if (text == "identity") return LinkKind::Identity;
  throw DataError("model document: unknown link '" + text + "'");
}

json config_to_json(const EbmConfig& cfg) {
  return json{{"n_rounds", cfg.n_rounds},
              {"learning_rate", cfg.learning_rate},
              {"max_leaves", cfg.max_leaves},
              {"n_interactions", cfg.n_interactions},
              {"interaction_rounds", cfg.interaction_rounds},
              {"link", link_to_string(cfg.link)},
              {"min_samples_leaf", cfg.min_samples_leaf},
              {"validation_frac", cfg.validation_frac},
              {"early_stop_patience", cfg.early_stop_patience},
              {"seed", cfg.seed}};
}

EbmConfig config_from_json(const json& j) {
  EbmConfig cfg;
  cfg.n_rounds = j.at("n_rounds").get<int>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.max_leaves = j.at("max_leaves").get<int>();
  cfg.n_interactions = j.at("n_interactions").get<int>();
  cfg.interaction_rounds = j.at("interaction_rounds").get<int>();
  cfg.link = link_from_string(j.at("link").get<std::string>());
  cfg.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  cfg.validation_frac = j.at("validation_frac").get<double>();
  cfg.early_stop_patience = j.value("early_stop_patience", 50);
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

json ebm_to_json(const EbmModel& model) {
  json doc;
  doc["format"] = "emakit-model";
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = "ebm";
  doc["link"] = link_to_string(model.link);
  doc["intercept"] = model.intercept;
  doc["feature_names"] = model.feature_names;
  doc["schema_fingerprint"] = model.schema_fingerprint;
  doc["degenerate_target"] = model.degenerate_target;
  doc["config"] = config_to_json(model.config);
  doc["rounds_used"] = model.rounds_used;
  doc["interaction_rounds_used"] = model.interaction_rounds_used;
  doc["main_terms"] = model.main_terms;
  doc["main_importance"] = model.main_importance;
  doc["pair_terms"] = json::array();
  for (const auto& pair : model.pair_terms) {
    doc["pair_terms"].push_back(json{{"feature_i", pair.feature_i},
                                     {"feature_j", pair.feature_j},
                                     {"rows", pair.rows},
                                     {"cols", pair.cols},
                                     {"table", pair.table},
                                     {"importance", pair.importance}});
  }
  return doc;
}

EbmModel ebm_from_json(const json& doc) {
  try {
    if (doc.at("kind").get<std::string>() != "ebm") {
      throw DataError("model document: expected kind 'ebm'");
    }
    EbmModel model;
    model.link = link_from_string(doc.at("link").get<std::string>());
    model.intercept = doc.at("intercept").get<double>();
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.schema_fingerprint = doc.at("schema_fingerprint").get<std::string>();
    model.degenerate_target = doc.at("degenerate_target").get<bool>();
    model.config = config_from_json(doc.at("config"));
    model.rounds_used = doc.at("rounds_used").get<int>();
    model.interaction_rounds_used = doc.at("interaction_rounds_used").get<int>();
    model.main_terms = doc.at("main_terms").get<std::vector<std::vector<double>>>();
    model.main_importance = doc.at("main_importance").get<std::vector<double>>();
    for (const auto& p : doc.at("pair_terms")) {
      PairTerm pair;
      pair.feature_i = p.at("feature_i").get<int>();
      pair.feature_j = p.at("feature_j").get<int>();
      pair.rows = p.at("rows").get<int>();
      pair.cols = p.at("cols").get<int>();
      pair.table = p.at("table").get<std::vector<double>>();
      pair.importance = p.at("importance").get<double>();
      if (pair.table.size() != static_cast<std::size_t>(pair.rows) *
                                   static_cast<std::size_t>(pair.cols)) {
        throw DataError("model document: pair table size mismatch");
      }
      model.pair_terms.push_back(std::move(pair));
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("model document: ") + e.what());
  }
}

json linear_to_json(const LinearModel& model) {
  json doc;
  doc["format"] = "emakit-model";
  doc["format_version"] = kModelFormatVersion;
  doc["kind"] = "logreg";
  doc["weights"] = model.weights;
  doc["bias"] = model.bias;
  doc["l2"] = model.l2;
  doc["feature_names"] = model.feature_names;
  doc["levels"] = model.levels;
  doc["schema_fingerprint"] = model.schema_fingerprint;
  doc["degenerate"] = model.degenerate;
  doc["converged"] = model.converged;
  doc["iterations"] = model.iterations;
  doc["final_loss"] = model.final_loss;
  return doc;
}

LinearModel linear_from_json(const json& doc) {
  try {
    if (doc.at("kind").get<std::string>() != "logreg") {
      throw DataError("model document: expected kind 'logreg'");
    }
    LinearModel model;
    model.weights = doc.at("weights").get<std::vector<double>>();
    model.bias = doc.at("bias").get<double>();
    model.l2 = doc.at("l2").get<double>();
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.levels = doc.at("levels").get<std::vector<int>>();
    model.schema_fingerprint = doc.at("schema_fingerprint").get<std::string>();
    model.degenerate = doc.at("degenerate").get<bool>();
    model.converged = doc.at("converged").get<bool>();
    model.iterations = doc.at("iterations").get<int>();
    model.final_loss = doc.at("final_loss").get<double>();
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("model document: ") + e.what());
  }
}

void save_model_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  out << doc.dump(2) << "\n";
}

json load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("model file '" + path + "': parse error: " + e.what());
  }
  if (!doc.is_object() || doc.value("format", std::string{}) != "emakit-model") {
    throw DataError("model file '" + path + "': not an emakit model document");
  }
  const int version = doc.value("format_version", -1);
  if (version != kModelFormatVersion) {
    throw DataError("model file '" + path + "': unsupported format version " +
                    std::to_string(version));
  }
  return doc;
}

std::string model_fingerprint(const EbmModel& model) {
  return to_hex(fnv1a64(ebm_to_json(model).dump()));
}

void save_shape_csv(const EbmModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write shape file '" + path + "'");
  char buf[64];
  out << "term,level_i,level_j,contribution,importance\n";
  for (std::size_t f = 0; f < model.main_terms.size(); ++f) {
    const std::string& name =
        f < model.feature_names.size() ? model.feature_names[f] : std::to_string(f);
    for (std::size_t l = 0; l < model.main_terms[f].size(); ++l) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g", model.main_terms[f][l],
                    model.main_importance[f]);
      out << name << "," << l << ",," << buf << "\n";
    }
  }
  for (const auto& pair : model.pair_terms) {
    const std::string name = model.feature_names[static_cast<std::size_t>(pair.feature_i)] +
                             " x " +
                             model.feature_names[static_cast<std::size_t>(pair.feature_j)];
    for (int a = 0; a < pair.rows; ++a) {
      for (int b = 0; b < pair.cols; ++b) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", pair.at(a, b), pair.importance);
        out << name << "," << a << "," << b << "," << buf << "\n";
      }
    }
  }
}

}  // namespace emakit
