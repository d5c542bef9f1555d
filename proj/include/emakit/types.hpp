#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emakit/timeutil.hpp"

namespace emakit {

inline constexpr int kMaxOrdinalLevels = 64;

enum class FeatureKind { Ordinal, Categorical };

// Per-feature schema entry shared by every individual in a study. Ordinal
// features carry a level count; categorical features a cardinality. Features
// ingested as continuous columns additionally carry the bin edges used to
// discretize them (levels - 1 ascending interior edges).
struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Ordinal;
  int levels = 2;
  std::vector<double> bin_edges;
  bool degenerate = false;  // constant source column, single occupied level

  void validate() const;
};

struct Observation {
  Minutes timestamp = 0;
  std::vector<int> features;
  std::optional<int> outcome;  // binary, absent until target construction
  std::string raw_outcome;     // verbatim outcome-column token, may be empty
};

struct IndividualSeries {
  std::string individual_id;
  std::vector<Observation> observations;
};

struct Study {
  std::vector<FeatureSpec> schema;
  std::vector<IndividualSeries> individuals;
  std::map<std::string, std::string> metadata;

  // Throws DataError on schema/feature-vector inconsistencies.
  void validate() const;
};

// Flat view of a study schema used by learners: names, level counts, and a
// stable fingerprint that models embed so rows can be checked at prediction.
struct SchemaView {
  std::vector<std::string> names;
  std::vector<int> levels;
  std::vector<bool> categorical;  // one-vs-rest splits instead of thresholds
  std::string fingerprint;

  static SchemaView from(const std::vector<FeatureSpec>& schema);
  std::size_t n_features() const { return levels.size(); }
};

// Supervised rows in original temporal order. `row_individual` records
// provenance; single-individual sets repeat one id, pooled sets interleave.
struct SupervisedSet {
  std::size_t n_cols = 0;
  std::vector<int> features;  // row-major, n_rows x n_cols
  std::vector<int> labels;
  std::vector<Minutes> row_timestamps;
  std::vector<std::string> row_individual;

  std::size_t n_rows() const { return labels.size(); }
  int at(std::size_t row, std::size_t col) const { return features[row * n_cols + col]; }
  std::span<const int> row(std::size_t r) const {
    return std::span<const int>(features.data() + r * n_cols, n_cols);
  }
  void append_row(std::span<const int> values, int label, Minutes timestamp,
                  const std::string& individual_id);
  std::size_t positives() const;
  std::size_t minority_count() const;
};

}  // namespace emakit
