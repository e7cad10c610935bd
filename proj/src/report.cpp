#include "qloop/report.hpp"

#include <algorithm>
#include <cmath>

namespace qloop {

void Report::add(std::string check, std::string location, double value, double tol, bool expect_above) {
  entries.push_back({std::move(check), std::move(location), value, tol, expect_above});
}

void Report::merge(const Report& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

bool Report::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.pass(); });
}

double Report::max_value() const {
  double m = 0.0;
  for (const auto& e : entries)
    if (!e.expect_above) m = std::max(m, std::isnan(e.value) ? INFINITY : e.value);
  return m;
}

std::size_t Report::failures() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const ReportEntry& e) { return !e.pass(); }));
}

}  // namespace qloop
