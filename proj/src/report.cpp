#include "shiftconv/report.hpp"

#include <iomanip>

namespace shiftconv {

nlohmann::json SumReport::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["re"] = value.real();
  j["im"] = value.imag();
  j["abs"] = std::abs(value);
  j["bound"] = bound;
  j["ratio"] = ratio;
  if (pass) {
    j["pass"] = *pass;
  } else {
    j["pass"] = nullptr;
  }
  j["params"] = params;
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

void write_reports_csv(std::ostream& out, const std::vector<SumReport>& reports) {
  out << "name,re,im,abs,bound,ratio,pass,params\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : reports) {
    std::string params = r.params.dump();
    // CSV-quote the embedded JSON.
    std::string quoted = "\"";
    for (char c : params) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';
    out << r.name << ',' << r.value.real() << ',' << r.value.imag() << ',' << std::abs(r.value)
        << ',' << r.bound << ',' << r.ratio << ',' << (r.pass ? (*r.pass ? "PASS" : "FAIL") : "-")
        << ',' << quoted << '\n';
  }
  out.precision(old_precision);
}

void write_reports_jsonl(std::ostream& out, const std::vector<SumReport>& reports) {
  for (const auto& r : reports) out << r.to_json().dump() << '\n';
}

}  // namespace shiftconv
