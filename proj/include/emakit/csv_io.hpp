#pragma once

#include <string>

#include "emakit/types.hpp"

namespace emakit {

// Study CSV: header `individual_id,timestamp,<feature...>[,<outcome>]`, one
// row per observation, timestamps ISO-8601 at minute resolution. The schema
// sidecar (JSON) declares each feature's kind and, for continuous columns,
// bin edges or a bin count; it also carries study metadata so a save/load
// round trip is lossless.

void save_study(const Study& study, const std::string& data_path, const std::string& schema_path);

// Loads and discretizes. Continuous columns are binned with study-global
// equi-width edges (or the sidecar's explicit edges); rows with any missing
// feature value are dropped (listwise deletion). Outcome tokens are kept
// verbatim in raw_outcome; labeling is a separate step.
Study load_study(const std::string& data_path, const std::string& schema_path);

void save_supervised_csv(const SupervisedSet& set, const SchemaView& schema,
                         const std::string& path);

}  // namespace emakit
