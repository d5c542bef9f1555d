#include "emakit/csv_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "emakit/errors.hpp"
#include "emakit/synth.hpp"

namespace emakit {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string kind_to_string(FeatureKind kind) {
  return kind == FeatureKind::Ordinal ? "ordinal" : "categorical";
}

struct SidecarFeature {
  FeatureSpec spec;
  bool continuous = false;  // needs binning at load time
  int bins = 0;
};

struct Sidecar {
  std::vector<SidecarFeature> features;
  std::string outcome_column;
  std::map<std::string, std::string> metadata;
};

Sidecar parse_sidecar(const std::string& schema_path) {
  std::ifstream in(schema_path);
  if (!in) throw DataError("cannot open schema file '" + schema_path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("schema '" + schema_path + "': " + e.what());
  }
  Sidecar sidecar;
  if (!doc.contains("features") || !doc["features"].is_array() || doc["features"].empty()) {
    throw DataError("schema '" + schema_path + "': missing features array");
  }
  for (const auto& f : doc["features"]) {
    SidecarFeature entry;
    entry.spec.name = f.at("name").get<std::string>();
    const std::string kind = f.value("kind", "ordinal");
    if (kind == "ordinal") {
      entry.spec.kind = FeatureKind::Ordinal;
      entry.spec.levels = f.at("levels").get<int>();
    } else if (kind == "categorical") {
      entry.spec.kind = FeatureKind::Categorical;
      entry.spec.levels = f.at("cardinality").get<int>();
    } else if (kind == "continuous") {
      entry.spec.kind = FeatureKind::Ordinal;
      entry.continuous = true;
      if (f.contains("bin_edges")) {
        entry.spec.bin_edges = f["bin_edges"].get<std::vector<double>>();
        entry.spec.levels = static_cast<int>(entry.spec.bin_edges.size()) + 1;
      } else {
        entry.bins = f.at("bins").get<int>();
        entry.spec.levels = entry.bins;
      }
    } else {
      throw DataError("schema feature '" + entry.spec.name + "': unknown kind '" + kind + "'");
    }
    if (f.contains("bin_edges") && kind != "continuous") {
      entry.spec.bin_edges = f["bin_edges"].get<std::vector<double>>();
    }
    sidecar.features.push_back(std::move(entry));
  }
  sidecar.outcome_column = doc.value("outcome_column", std::string{});
  if (doc.contains("metadata")) {
    for (const auto& [key, value] : doc["metadata"].items()) {
      sidecar.metadata[key] = value.get<std::string>();
    }
  }
  return sidecar;
}

int bin_with_edges(double value, const std::vector<double>& edges) {
  int idx = 0;
  while (idx < static_cast<int>(edges.size()) && value >= edges[static_cast<std::size_t>(idx)]) {
    ++idx;
  }
  return idx;
}

}  // namespace

void save_study(const Study& study, const std::string& data_path,
                const std::string& schema_path) {
  json schema_doc;
  schema_doc["version"] = 1;
  schema_doc["features"] = json::array();
  for (const auto& spec : study.schema) {
    json f;
    f["name"] = spec.name;
    f["kind"] = kind_to_string(spec.kind);
    if (spec.kind == FeatureKind::Ordinal) {
      f["levels"] = spec.levels;
    } else {
      f["cardinality"] = spec.levels;
    }
    if (!spec.bin_edges.empty()) f["bin_edges"] = spec.bin_edges;
    schema_doc["features"].push_back(std::move(f));
  }
  schema_doc["outcome_column"] = "outcome";
  schema_doc["metadata"] = study.metadata;

  std::ofstream schema_out(schema_path);
  if (!schema_out) throw DataError("cannot write schema file '" + schema_path + "'");
  schema_out << schema_doc.dump(2) << "\n";

  std::ofstream out(data_path);
  if (!out) throw DataError("cannot write data file '" + data_path + "'");
  out << "individual_id,timestamp";
  for (const auto& spec : study.schema) out << "," << spec.name;
  out << ",outcome\n";
  for (const auto& series : study.individuals) {
    for (const auto& obs : series.observations) {
      out << series.individual_id << "," << format_iso_minutes(obs.timestamp);
      for (int level : obs.features) out << "," << level;
      out << ",";
      if (!obs.raw_outcome.empty()) {
        out << obs.raw_outcome;
      } else if (obs.outcome) {
        out << *obs.outcome;
      }
      out << "\n";
    }
  }
}

Study load_study(const std::string& data_path, const std::string& schema_path) {
  Sidecar sidecar = parse_sidecar(schema_path);

  std::ifstream in(data_path);
  if (!in) throw DataError("cannot open data file '" + data_path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("data file '" + data_path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "individual_id" || header[1] != "timestamp") {
    throw DataError("data file '" + data_path +
                    "': header must start with individual_id,timestamp");
  }

  std::vector<int> feature_cols(sidecar.features.size(), -1);
  int outcome_col = -1;
  for (std::size_t c = 2; c < header.size(); ++c) {
    bool matched = false;
    for (std::size_t f = 0; f < sidecar.features.size(); ++f) {
      if (header[c] == sidecar.features[f].spec.name) {
        feature_cols[f] = static_cast<int>(c);
        matched = true;
        break;
      }
    }
    if (!matched && header[c] == sidecar.outcome_column) {
      outcome_col = static_cast<int>(c);
      matched = true;
    }
    if (!matched) {
      throw DataError("data column '" + header[c] + "' not declared in schema");
    }
  }
  for (std::size_t f = 0; f < sidecar.features.size(); ++f) {
    if (feature_cols[f] < 0) {
      throw DataError("schema feature '" + sidecar.features[f].spec.name +
                      "' missing from data header");
    }
  }

  struct RawRow {
    std::string individual_id;
    Minutes timestamp;
    std::vector<std::string> cells;  // per feature
    std::string outcome;
  };
  std::vector<RawRow> rows;
  std::size_t dropped_incomplete = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < header.size() - (outcome_col >= 0 ? 1 : 0)) {
      throw DataError("data file '" + data_path + "' line " + std::to_string(line_no) +
                      ": wrong column count");
    }
    RawRow row;
    row.individual_id = cells[0];
    row.timestamp = parse_iso_minutes(cells[1]);
    bool complete = true;
    for (std::size_t f = 0; f < sidecar.features.size(); ++f) {
      const auto c = static_cast<std::size_t>(feature_cols[f]);
      const std::string& cell = c < cells.size() ? cells[c] : std::string{};
      if (cell.empty()) {
        complete = false;
        break;
      }
      row.cells.push_back(cell);
    }
    if (!complete) {
      ++dropped_incomplete;
      continue;
    }
    if (outcome_col >= 0 && static_cast<std::size_t>(outcome_col) < cells.size()) {
      row.outcome = cells[static_cast<std::size_t>(outcome_col)];
    }
    rows.push_back(std::move(row));
  }

  // Global equi-width edges for continuous columns, then per-row levels.
  for (std::size_t f = 0; f < sidecar.features.size(); ++f) {
    auto& entry = sidecar.features[f];
    if (!entry.continuous || !entry.spec.bin_edges.empty()) continue;
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& row : rows) values.push_back(std::atof(row.cells[f].c_str()));
    if (values.empty()) throw DataError("continuous feature '" + entry.spec.name + "': no data");
    const DiscretizeResult disc = discretize_equiwidth(values, entry.bins);
    if (disc.degenerate) {
      entry.spec.degenerate = true;
    } else {
      entry.spec.bin_edges = disc.edges;
    }
  }

  Study study;
  for (const auto& entry : sidecar.features) study.schema.push_back(entry.spec);
  study.metadata = sidecar.metadata;

  std::map<std::string, std::size_t> index_of;
  for (auto& row : rows) {
    auto [it, inserted] = index_of.try_emplace(row.individual_id, study.individuals.size());
    if (inserted) {
      IndividualSeries series;
      series.individual_id = row.individual_id;
      study.individuals.push_back(std::move(series));
    }
    Observation obs;
    obs.timestamp = row.timestamp;
    obs.raw_outcome = row.outcome;
    obs.features.reserve(sidecar.features.size());
    for (std::size_t f = 0; f < sidecar.features.size(); ++f) {
      const auto& entry = sidecar.features[f];
      int level = 0;
      if (entry.continuous) {
        if (entry.spec.degenerate) {
          level = 0;
        } else {
          level = bin_with_edges(std::atof(row.cells[f].c_str()), entry.spec.bin_edges);
        }
      } else {
        char* end = nullptr;
        const long parsed = std::strtol(row.cells[f].c_str(), &end, 10);
        if (end == row.cells[f].c_str() || parsed < 0 || parsed >= entry.spec.levels) {
          throw DataError("feature '" + entry.spec.name + "': value '" + row.cells[f] +
                          "' outside [0, " + std::to_string(entry.spec.levels) + ")");
        }
        level = static_cast<int>(parsed);
      }
      obs.features.push_back(level);
    }
    study.individuals[it->second].observations.push_back(std::move(obs));
  }

  for (auto& series : study.individuals) {
    std::stable_sort(series.observations.begin(), series.observations.end(),
                     [](const Observation& a, const Observation& b) {
                       return a.timestamp < b.timestamp;
                     });
  }
  if (dropped_incomplete > 0) {
    study.metadata["dropped_incomplete_rows"] = std::to_string(dropped_incomplete);
  }
  study.validate();
  return study;
}

void save_supervised_csv(const SupervisedSet& set, const SchemaView& schema,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "individual_id,timestamp";
  for (const auto& name : schema.names) out << "," << name;
  out << ",label\n";
  for (std::size_t r = 0; r < set.n_rows(); ++r) {
    out << set.row_individual[r] << "," << format_iso_minutes(set.row_timestamps[r]);
    for (std::size_t c = 0; c < set.n_cols; ++c) out << "," << set.at(r, c);
    out << "," << set.labels[r] << "\n";
  }
}

}  // namespace emakit
