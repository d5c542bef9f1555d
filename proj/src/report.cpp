#include "emakit/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "emakit/errors.hpp"
#include "emakit/util.hpp"

namespace emakit {

std::string format_auc(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

void write_per_individual_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report '" + path + "'");
  out << "individual_id,method,auc\n";
  for (const auto& score : report.per_individual) {
    out << score.id << "," << report.method << ","
        << (score.auc ? format_auc(*score.auc) : "NA") << "\n";
  }
}

void write_aggregate_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report '" + path + "'");
  out << "method,n,mean,std,q1,median,q3,min,max,outlier_ids,relative_change_vs_baseline\n";
  const auto& agg = report.aggregate;
  out << report.method << "," << agg.n_defined << "," << format_auc(agg.mean) << ","
      << format_auc(agg.stddev) << "," << format_auc(agg.q1) << "," << format_auc(agg.median)
      << "," << format_auc(agg.q3) << "," << format_auc(agg.min) << "," << format_auc(agg.max)
      << ",";
  for (std::size_t i = 0; i < agg.outlier_ids.size(); ++i) {
    if (i > 0) out << ";";
    out << agg.outlier_ids[i];
  }
  out << ",";
  if (agg.relative_change) out << format_auc(*agg.relative_change);
  out << "\n";
}

void write_distill_csv(const std::vector<DistillRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write report '" + path + "'");
  out << "individual_id,T,cv_auc,test_auc,n_train,n_test,selected\n";
  char t_buf[32];
  for (const auto& r : records) {
    std::snprintf(t_buf, sizeof(t_buf), "%g", r.temperature);
    out << r.individual_id << "," << t_buf << "," << format_auc(r.cv_auc) << ","
        << (r.test_auc ? format_auc(*r.test_auc) : "NA") << "," << r.n_train << "," << r.n_test
        << "," << (r.selected ? 1 : 0) << "\n";
  }
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot hash '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  return to_hex(fnv1a64(bytes));
}

}  // namespace emakit
