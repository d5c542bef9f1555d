#pragma once

#include <string>

#include <json.hpp>

#include "emakit/ebm.hpp"
#include "emakit/linear.hpp"

namespace emakit {

inline constexpr int kModelFormatVersion = 1;

// Versioned model documents. Round trips are exact: nlohmann serializes
// doubles with shortest round-trip precision.
nlohmann::json ebm_to_json(const EbmModel& model);
EbmModel ebm_from_json(const nlohmann::json& doc);  // throws DataError

nlohmann::json linear_to_json(const LinearModel& model);
LinearModel linear_from_json(const nlohmann::json& doc);

void save_model_file(const nlohmann::json& doc, const std::string& path);
nlohmann::json load_model_file(const std::string& path);  // validates format + version

// Stable content hash of a model document, used as the teacher fingerprint.
std::string model_fingerprint(const EbmModel& model);

// Shape-function export: one row per (term, level(s)) with its contribution
// and the term importance.
void save_shape_csv(const EbmModel& model, const std::string& path);

}  // namespace emakit
