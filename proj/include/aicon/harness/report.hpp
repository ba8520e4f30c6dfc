#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace aicon::harness {

struct ReportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic aggregation over result CSVs (BW bench and drawer bench
// schemas, mixed freely). Re-running over regenerated inputs reproduces the
// same report byte for byte.
struct SummaryReport {
  std::string csv_header;
  std::vector<std::string> csv_rows;
  std::string human;
};

SummaryReport aggregate_report(const std::vector<std::string>& files);

}  // namespace aicon::harness
