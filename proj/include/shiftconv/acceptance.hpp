#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftconv/coefficients.hpp"

namespace shiftconv {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0;
  double runtime_limit = 0;  // 0 = none
  std::string summary;
  nlohmann::json data = nlohmann::json::object();

  nlohmann::json to_json() const;
};

struct AcceptanceOptions {
  bool quick = false;  // reduced sizes, for smoke runs
  unsigned workers = 1;
  std::uint64_t seed = 0;
  std::string cache_dir;  // empty: streams are built in memory
};

/// Streams shared across criteria, built on first use.
class AcceptanceContext {
 public:
  explicit AcceptanceContext(AcceptanceOptions options);
  ~AcceptanceContext();

  const AcceptanceOptions& options() const { return options_; }
  const CoefficientStream& gl2(u64 n);
  const CoefficientStream& sym2(u64 n);

 private:
  AcceptanceOptions options_;
  std::unique_ptr<CoefficientStream> gl2_, sym2_;
};

inline constexpr int kCriterionCount = 10;

/// Parameterised forms of criteria 1-4 (ids and thresholds as in the battery).
/// Identities: exhaustive for d l <= exhaustive_max, `samples` random triples up to random_max.
CriterionResult check_identities(u64 random_max, u64 exhaustive_max, u64 samples, std::uint64_t seed,
                                 unsigned workers = 1);
/// Weil over all p < p_max and the Kl bound on q_count random squarefree q <= 10^4.
CriterionResult check_weil(u64 p_max, u64 q_count, std::uint64_t seed, unsigned workers = 1);
CriterionResult check_fourier(u64 p_max, u64 functions, std::uint64_t seed);
CriterionResult check_correlation(u64 lo, u64 hi, u64 tuples, std::uint64_t seed, unsigned workers = 1);

CriterionResult run_criterion(int id, AcceptanceContext& ctx);

/// Criteria in `only` (all when empty), in id order.
std::vector<CriterionResult> run_acceptance(AcceptanceContext& ctx, const std::set<int>& only = {});

/// "[PASS] 3 fourier transform mod p (0.02 s): ..." style line.
std::string format_line(const CriterionResult& r);

}  // namespace shiftconv
