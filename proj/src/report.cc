#include "tierflow/report.h"

#include <sstream>

namespace tierflow {

namespace {

std::string scalar(const ReportData &v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

bool all_scalars(const ReportData &arr) {
  for (const auto &v : arr) {
    if (v.is_structured()) return false;
  }
  return true;
}

void render(std::ostream &out, const ReportData &obj, int indent) {
  std::string pad(indent, ' ');
  for (const auto &[key, v] : obj.items()) {
    if (v.is_object()) {
      out << pad << key << ":\n";
      render(out, v, indent + 2);
    } else if (v.is_array() && all_scalars(v)) {
      out << pad << key << ": ";
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << scalar(v[i]);
      out << '\n';
    } else if (v.is_array()) {
      out << pad << key << ":\n";
      for (const auto &item : v) {
        if (item.is_object()) {
          out << pad << "  -\n";
          render(out, item, indent + 4);
        } else {
          out << pad << "  - " << scalar(item) << '\n';
        }
      }
    } else {
      out << pad << key << ": " << scalar(v) << '\n';
    }
  }
}

}  // namespace

Report::Report(std::string kind) { data_["report"] = std::move(kind); }

std::string Report::text() const {
  std::ostringstream out;
  render(out, data_, 0);
  return out.str();
}

std::string Report::json() const { return data_.dump(2) + "\n"; }

}  // namespace tierflow
