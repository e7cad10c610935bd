#pragma once
#include <string>
#include <vector>

namespace qloop {

struct ReportEntry {
  std::string check;
  std::string location;
  double value = 0.0;
  double tol = 0.0;
  // Most checks pass when value < tol; negative controls pass when value > tol.
  bool expect_above = false;
  bool pass() const { return expect_above ? value > tol : value < tol; }
};

struct Report {
  std::vector<ReportEntry> entries;

  void add(std::string check, std::string location, double value, double tol, bool expect_above = false);
  void merge(const Report& other);
  bool all_pass() const;
  double max_value() const;
  std::size_t failures() const;
};

}  // namespace qloop
