#pragma once

#include <complex>
#include <span>
#include <vector>

#include <json.hpp>

#include "shiftconv/arith.hpp"
#include "shiftconv/coefficients.hpp"
#include "shiftconv/report.hpp"
#include "shiftconv/windows.hpp"

namespace shiftconv {

using cplx = std::complex<double>;

/// Weight of the level-one form behind the tau stream.
inline constexpr unsigned kHolomorphicWeight = 12;

/// J_order(x) for order <= 50 and x >= 0.
double bessel_j(unsigned order, double x);

/// h(x) = window(x / Y); the default window is the bump on [1, 2].
/// truncation = 0 picks the automatic cutoff for the dual sum.
struct VoronoiTestCase {
  i64 a = 1;
  u64 q = 1;
  double y_scale = 1000;
  SmoothWindow window = SmoothWindow::v_default();
  u64 truncation = 0;

  /// Throws std::invalid_argument unless q >= 1, Y > 0 and gcd(a, q) = 1.
  void validate() const;
  double h(double x) const { return window(x / y_scale); }
};

/// Smallest dual index whose phase 4 pi sqrt(n x)/q sweeps `periods` full turns
/// across the support of h.
u64 dual_cutoff(u64 q, double y_scale, const SmoothWindow& window, double periods = 80.0);

/// H(y) = integral of window(x/Y) J_{k-1}(4 pi sqrt(x y)) dx.  Gauss-Legendre
/// panels with at least 8 nodes per oscillation.
double hankel_transform(double y, double y_scale, const SmoothWindow& window = SmoothWindow::v_default());

/// sum_n lambda(n) e(a n/q) h(n).  Throws std::out_of_range when the stream is short.
cplx voronoi_lhs(const VoronoiTestCase& tc, const CoefficientStream& stream);

struct DualSum {
  cplx value{};
  u64 truncation = 0;
  bool truncation_warning = false;  // cutoff below the effective support
  double tail_ratio = 0;            // |last term| / max |term|
};

/// (2 pi i^k / q) sum_{n <= N} lambda(n) e(-abar n/q) H(n / q^2).
DualSum voronoi_rhs(const VoronoiTestCase& tc, const CoefficientStream& stream, unsigned workers = 1);

/// As above with the transforms H(n / q^2), n = 1..N, supplied by the caller.
DualSum voronoi_rhs(const VoronoiTestCase& tc, const CoefficientStream& stream,
                    std::span<const double> transforms);

/// H(n / q^2) for n = 1..N, shared by every a mod q.
std::vector<double> dual_transforms(u64 q, double y_scale, const SmoothWindow& window, u64 n_max,
                                    unsigned workers = 1);

struct VoronoiResult {
  i64 a = 0;
  u64 q = 0;
  double y_scale = 0;
  cplx lhs{};
  cplx rhs{};
  double rel_err = 0;
  u64 truncation = 0;
  bool warn = false;

  nlohmann::json to_json() const;
};

VoronoiResult voronoi_check(const VoronoiTestCase& tc, const CoefficientStream& stream, unsigned workers = 1);

/// Every a mod q coprime to q, every q <= q_max, every Y in the list.
std::vector<VoronoiResult> voronoi_sweep(u64 q_max, std::span<const double> y_scales,
                                         const CoefficientStream& stream, unsigned workers = 1);

/// Longest stream any case of the sweep reads.
u64 voronoi_stream_length(u64 q_max, std::span<const double> y_scales,
                          const SmoothWindow& window = SmoothWindow::v_default());

/// Decay of |H(y)| for y Y in the grid range.  The envelope (running max from
/// the right) is fitted against log(yY); value = fitted A, pass when A >= 3.
/// params carry |H|/Y at the smallest and largest grid points.
SumReport transform_decay_check(double y_scale, std::span<const double> y_grid,
                                const SmoothWindow& window = SmoothWindow::v_default());

/// Log-spaced grid of y with y Y running from lo to hi.
std::vector<double> decay_grid(double y_scale, double lo = 10, double hi = 1000, std::size_t points = 61);

}  // namespace shiftconv
