#pragma once

#include <complex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace shiftconv {

/// Structured result of a sum or bound measurement.  `params` holds every
/// input needed to reproduce the measurement.
struct SumReport {
  std::string name;
  std::complex<double> value{};
  double bound = 0.0;
  double ratio = 0.0;
  std::optional<bool> pass;  // empty for report-only measurements
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

void write_reports_csv(std::ostream& out, const std::vector<SumReport>& reports);
void write_reports_jsonl(std::ostream& out, const std::vector<SumReport>& reports);

}  // namespace shiftconv
