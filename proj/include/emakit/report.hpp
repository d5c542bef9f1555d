#pragma once

#include <string>
#include <vector>

#include "emakit/distill.hpp"
#include "emakit/metrics.hpp"

namespace emakit {

// Tabular: individual_id,method,auc ("NA" when undefined).
void write_per_individual_csv(const EvalReport& report, const std::string& path);

// One row: method, mean, std, q1, median, q3, min, max, outlier_ids,
// relative_change_vs_baseline.
void write_aggregate_csv(const EvalReport& report, const std::string& path);

// Tabular: individual_id,T,cv_auc,test_auc,n_train,n_test,selected.
void write_distill_csv(const std::vector<DistillRecord>& records, const std::string& path);

// Content hash used by the manifest for reproducibility checks.
std::string file_hash_hex(const std::string& path);

std::string format_auc(double value);

}  // namespace emakit
