#include "emakit/types.hpp"

#include <algorithm>
#include <limits>

#include "emakit/errors.hpp"
#include "emakit/util.hpp"

namespace emakit {

void FeatureSpec::validate() const {
  if (name.empty()) throw DataError("feature with empty name");
  if (levels < 2 || levels > kMaxOrdinalLevels) {
    throw DataError("feature '" + name + "': level count " + std::to_string(levels) +
                    " outside [2, " + std::to_string(kMaxOrdinalLevels) + "]");
  }
  if (!bin_edges.empty()) {
    if (bin_edges.size() != static_cast<std::size_t>(levels - 1)) {
      throw DataError("feature '" + name + "': expected " + std::to_string(levels - 1) +
                      " bin edges, got " + std::to_string(bin_edges.size()));
    }
    for (std::size_t i = 1; i < bin_edges.size(); ++i) {
      if (!(bin_edges[i - 1] < bin_edges[i])) {
        throw DataError("feature '" + name + "': bin edges not strictly ascending");
      }
    }
  }
}

void Study::validate() const {
  for (const auto& spec : schema) spec.validate();
  for (const auto& series : individuals) {
    Minutes prev = std::numeric_limits<Minutes>::min();
    for (const auto& obs : series.observations) {
      if (obs.features.size() != schema.size()) {
        throw DataError("individual '" + series.individual_id +
                        "': feature vector length does not match schema");
      }
      for (std::size_t f = 0; f < schema.size(); ++f) {
        if (obs.features[f] < 0 || obs.features[f] >= schema[f].levels) {
          throw DataError("individual '" + series.individual_id + "': feature '" +
                          schema[f].name + "' value " + std::to_string(obs.features[f]) +
                          " outside [0, " + std::to_string(schema[f].levels) + ")");
        }
      }
      if (obs.timestamp < prev) {
        throw DataError("individual '" + series.individual_id + "': timestamps decrease");
      }
      prev = obs.timestamp;
    }
  }
}

SchemaView SchemaView::from(const std::vector<FeatureSpec>& schema) {
  SchemaView view;
  std::uint64_t h = kFnvOffset;
  for (const auto& spec : schema) {
    view.names.push_back(spec.name);
    view.levels.push_back(spec.levels);
    view.categorical.push_back(spec.kind == FeatureKind::Categorical);
    h = fnv1a64(spec.name, h);
    const char kind = spec.kind == FeatureKind::Ordinal ? 'o' : 'c';
    h = fnv1a64(&kind, 1, h);
    h = fnv1a64(&spec.levels, sizeof(spec.levels), h);
    for (double edge : spec.bin_edges) h = fnv1a64(&edge, sizeof(edge), h);
  }
  view.fingerprint = to_hex(h);
  return view;
}

void SupervisedSet::append_row(std::span<const int> values, int label, Minutes timestamp,
                               const std::string& individual_id) {
  if (n_cols == 0) n_cols = values.size();
  features.insert(features.end(), values.begin(), values.end());
  labels.push_back(label);
  row_timestamps.push_back(timestamp);
  row_individual.push_back(individual_id);
}

std::size_t SupervisedSet::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

std::size_t SupervisedSet::minority_count() const {
  const std::size_t pos = positives();
  return std::min(pos, labels.size() - pos);
}

}  // namespace emakit
