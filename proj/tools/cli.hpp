#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace shiftconv::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kRange = 3 };

enum class Format { Csv, Json, Text };

std::string_view to_string(Format f);
Format format_from_string(std::string_view name);

struct RunConfig {
  std::string subcommand;
  nlohmann::json params = nlohmann::json::object();  // resolved, every key present
  Format format = Format::Text;
  unsigned workers = 1;
  std::string cache_dir;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

/// Thrown for values outside a parameter's allowed range.
struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Names of every subcommand in help order.
std::vector<std::string> subcommands();

/// Default parameters of a subcommand; throws std::invalid_argument for unknown names.
nlohmann::json default_params(const std::string& subcommand);

/// Runs one resolved configuration and writes the report.  Returns 0/1 for
/// pass/fail (0 for report-only runs); library range errors become 3.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line: flags > --config file (key=value) > SHIFTCONV_WORKERS /
/// SHIFTCONV_CACHE_DIR > defaults; --replay takes the config from an earlier output.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shiftconv::cli
