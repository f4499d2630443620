#include <cstdio>

#include "sarcasm/eval.hpp"

namespace sarcasm {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string reports_to_csv(const std::vector<ExperimentReport>& reports) {
  std::string out =
      "row_name,f1_sarcastic,accuracy,tp,fp,fn,tn,gamma,C,delete_rate,replace_rate,backend,"
      "preprocess,augmentation,test_fraction,seed,n_train,n_test,status\n";
  for (const auto& r : reports) {
    out += csv_field(r.row_name) + ',' + fixed(r.f1_sarcastic, 4) + ',' + fixed(r.accuracy, 4) +
           ',' + std::to_string(r.confusion.tp) + ',' + std::to_string(r.confusion.fp) + ',' +
           std::to_string(r.confusion.fn) + ',' + std::to_string(r.confusion.tn) + ',' +
           general(r.gamma) + ',' + general(r.C) + ',' + general(r.delete_rate) + ',' +
           general(r.replace_rate) + ',' + csv_field(r.backend) + ',' + csv_field(r.preprocess) +
           ',' + csv_field(r.augmentation) + ',' + general(r.test_fraction) + ',' +
           std::to_string(r.seed) + ',' + std::to_string(r.n_train) + ',' +
           std::to_string(r.n_test) + ',' + (r.ok ? "ok" : "failed") + '\n';
  }
  return out;
}

std::string reports_to_json(const std::vector<ExperimentReport>& reports) {
  nlohmann::ordered_json doc;
  doc["schema"] = "sarcasm-report";
  doc["schema_version"] = kReportSchemaVersion;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : reports) rows.push_back(r.to_json());
  doc["reports"] = std::move(rows);
  return doc.dump(2) + '\n';
}

}  // namespace sarcasm
