#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shiftconv/arith.hpp"
#include "shiftconv/report.hpp"

namespace shiftconv {

using i128 = __int128;

enum class StreamKind : std::uint64_t {
  Gl2HolomorphicDelta = 1,
  Gl3Sym2Lift = 2,
  Gl3Tau3Proxy = 3,
  Custom = 4,
};

std::string_view to_string(StreamKind kind);
StreamKind stream_kind_from_string(std::string_view name);

/// Immutable coefficient sequence a(1), ..., a(N).
class CoefficientStream {
 public:
  CoefficientStream(StreamKind kind, std::vector<double> values, std::string provenance);

  StreamKind kind() const { return kind_; }
  u64 size() const { return values_.size(); }
  const std::string& provenance() const { return provenance_; }

  /// a(n) for 1 <= n <= size(); throws std::out_of_range otherwise.
  double at(u64 n) const;
  double operator()(u64 n) const { return values_[n - 1]; }
  /// values()[n - 1] = a(n).
  std::span<const double> values() const { return values_; }

 private:
  StreamKind kind_;
  std::vector<double> values_;
  std::string provenance_;
};

/// tau(1..N) as exact 128-bit integers; result[n - 1] = tau(n).
std::vector<i128> ramanujan_tau(u64 n_max);

std::string to_string(i128 v);

/// lambda_2(n) = tau(n) / n^{11/2}.
CoefficientStream lambda_gl2(u64 n_max);

/// A(1, n) = sum_{a^2 b = n} lambda_2(b^2), built multiplicatively.
CoefficientStream sym2_lift(u64 n_max);

/// Same, reusing an existing gl2 stream of at least n_max terms.
CoefficientStream sym2_lift(const CoefficientStream& gl2, u64 n_max);

/// Number of ordered factorizations n = abc.
CoefficientStream tau3(u64 n_max);

/// Constant stream, mainly for tests and degenerate checks.
CoefficientStream constant_stream(u64 n_max, double value = 1.0);

/// lambda(m1, m2) = sum_{d | (m1, m2)} mu(d) lambda(m1/d, 1) lambda(1, m2/d) with the
/// self-dual convention lambda(m, 1) = lambda(1, m).
double lambda1_full(u64 m1, u64 m2, const CoefficientStream& stream);

/// sum_{n <= N'} |a(n)|^2 / N' over N' = N, N/2, N/4, ... (>= 64).  Passes when every
/// ratio is <= 100 and each doubling grows it by at most 2.5x.
SumReport second_moment_check(const CoefficientStream& stream, u64 n_max);

/// Binary column cache of streams keyed by (kind, N).
class StreamCache {
 public:
  explicit StreamCache(std::filesystem::path dir);

  const std::filesystem::path& directory() const { return dir_; }
  std::filesystem::path file_for(StreamKind kind, u64 n) const;

  /// Loads from disk when a valid file exists, otherwise builds and stores.
  CoefficientStream get(StreamKind kind, u64 n);

  static void write(const std::filesystem::path& file, const CoefficientStream& stream);
  /// Throws std::runtime_error on a missing, truncated or corrupt file.
  static CoefficientStream read(const std::filesystem::path& file);

 private:
  std::filesystem::path dir_;
};

/// Builds a stream of the given kind without touching any cache.
CoefficientStream build_stream(StreamKind kind, u64 n);

}  // namespace shiftconv
