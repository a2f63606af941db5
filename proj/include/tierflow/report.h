#pragma once

// Common report format shared by every verdict: an ordered key/value tree
// rendered either as indented `key: value` text or as JSON.

#include <string>

#include <json.hpp>

namespace tierflow {

using ReportData = nlohmann::ordered_json;

class Report {
 public:
  explicit Report(std::string kind);

  ReportData &data() { return data_; }
  const ReportData &data() const { return data_; }
  ReportData &operator[](const std::string &key) { return data_[key]; }

  /// Nested objects indent by two spaces; scalar arrays join with ", ";
  /// arrays of objects print one `-` item per element.
  std::string text() const;
  std::string json() const;

 private:
  ReportData data_;
};

}  // namespace tierflow
