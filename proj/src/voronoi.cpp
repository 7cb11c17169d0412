#include "shiftconv/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "shiftconv/parallel.hpp"

namespace shiftconv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx unit_phase(i64 num, u64 den) {
  const u64 r = mod_reduce(num, den);
  const double t = kTwoPi * static_cast<double>(r) / static_cast<double>(den);
  return {std::cos(t), std::sin(t)};
}

// i^k
cplx i_power(unsigned k) {
  switch (k % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

double oscillation_periods(double y, double lo, double hi) {
  return 2.0 * std::sqrt(y) * (std::sqrt(hi) - std::sqrt(lo));
}

}  // namespace

double bessel_j(unsigned order, double x) {
  if (order > 50) throw std::invalid_argument("bessel_j: order above 50");
  if (!(x >= 0.0)) throw std::invalid_argument("bessel_j: negative argument");
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  return boost::math::cyl_bessel_j(static_cast<double>(order), x);
}

void VoronoiTestCase::validate() const {
  if (q == 0) throw std::invalid_argument("voronoi: q must be positive");
  if (!(y_scale > 0)) throw std::invalid_argument("voronoi: Y must be positive");
  if (gcd(mod_reduce(a, q), q) != 1) throw std::invalid_argument("voronoi: gcd(a, q) != 1");
}

u64 dual_cutoff(u64 q, double y_scale, const SmoothWindow& window, double periods) {
  if (window.empty()) return 0;
  const double span = std::sqrt(window.hi() * y_scale) - std::sqrt(window.lo() * y_scale);
  const double root = periods * static_cast<double>(q) / (2.0 * span);
  return static_cast<u64>(std::ceil(root * root));
}

double hankel_transform(double y, double y_scale, const SmoothWindow& window) {
  if (window.empty() || y < 0) return 0.0;
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const double lo = window.lo() * y_scale;
  const double hi = window.hi() * y_scale;
  const double periods = oscillation_periods(y, lo, hi);
  const auto panels = static_cast<std::size_t>(std::max(32.0, std::ceil(periods * 8.0 / 20.0) * 2.0));
  const double width = (hi - lo) / static_cast<double>(panels);
  const unsigned order = kHolomorphicWeight - 1;
  const double scale = 4.0 * std::numbers::pi * std::sqrt(y);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = lo + width * static_cast<double>(p);
    total += Rule::integrate(
        [&](double x) { return window(x / y_scale) * bessel_j(order, scale * std::sqrt(x)); }, a,
        a + width);
  }
  return total;
}

cplx voronoi_lhs(const VoronoiTestCase& tc, const CoefficientStream& stream) {
  tc.validate();
  if (tc.window.empty()) return {};
  const auto first = static_cast<u64>(std::floor(tc.window.lo() * tc.y_scale)) + 1;
  const auto last = static_cast<u64>(std::ceil(tc.window.hi() * tc.y_scale));
  if (stream.size() < last) throw std::out_of_range("voronoi_lhs: stream shorter than the window support");
  cplx total{};
  for (u64 n = std::max<u64>(first, 1); n <= last; ++n) {
    const double hn = tc.h(static_cast<double>(n));
    if (hn == 0.0) continue;
    total += stream(n) * hn * unit_phase(static_cast<i64>(mul_mod(mod_reduce(tc.a, tc.q), n % tc.q, tc.q)), tc.q);
  }
  return total;
}

std::vector<double> dual_transforms(u64 q, double y_scale, const SmoothWindow& window, u64 n_max,
                                    unsigned workers) {
  const double q2 = static_cast<double>(q) * static_cast<double>(q);
  return parallel_map(n_max, workers, [&](std::size_t i) {
    return hankel_transform(static_cast<double>(i + 1) / q2, y_scale, window);
  });
}

DualSum voronoi_rhs(const VoronoiTestCase& tc, const CoefficientStream& stream,
                    std::span<const double> transforms) {
  tc.validate();
  DualSum out;
  out.truncation = transforms.size();
  const u64 needed = dual_cutoff(tc.q, tc.y_scale, tc.window);
  out.truncation_warning = out.truncation < needed;
  if (tc.window.empty() || transforms.empty()) return out;
  if (stream.size() < transforms.size()) throw std::out_of_range("voronoi_rhs: stream shorter than the cutoff");

  const i64 abar = tc.q == 1 ? 0 : static_cast<i64>(mod_inv(tc.a, tc.q));
  double largest = 0;
  cplx total{};
  for (u64 n = 1; n <= transforms.size(); ++n) {
    const cplx term = stream(n) * transforms[n - 1] * unit_phase(-static_cast<i64>(mul_mod(abar, n % tc.q, tc.q)), tc.q);
    largest = std::max(largest, std::abs(term));
    total += term;
  }
  const double last = std::abs(stream(transforms.size()) * transforms.back());
  out.tail_ratio = largest > 0 ? last / largest : 0.0;
  out.value = kTwoPi * i_power(kHolomorphicWeight) / static_cast<double>(tc.q) * total;
  return out;
}

DualSum voronoi_rhs(const VoronoiTestCase& tc, const CoefficientStream& stream, unsigned workers) {
  tc.validate();
  const u64 n_max = tc.truncation ? tc.truncation : dual_cutoff(tc.q, tc.y_scale, tc.window);
  const auto transforms = dual_transforms(tc.q, tc.y_scale, tc.window, n_max, workers);
  return voronoi_rhs(tc, stream, transforms);
}

nlohmann::json VoronoiResult::to_json() const {
  return {{"a", a},
          {"q", q},
          {"Y", y_scale},
          {"lhs", {lhs.real(), lhs.imag()}},
          {"rhs", {rhs.real(), rhs.imag()}},
          {"rel_err", rel_err},
          {"truncation", truncation},
          {"warn", warn}};
}

namespace {

VoronoiResult make_result(const VoronoiTestCase& tc, cplx lhs, const DualSum& rhs) {
  VoronoiResult r;
  r.a = tc.a;
  r.q = tc.q;
  r.y_scale = tc.y_scale;
  r.lhs = lhs;
  r.rhs = rhs.value;
  const double scale = std::max(std::abs(lhs), std::abs(rhs.value));
  r.rel_err = scale > 0 ? std::abs(lhs - rhs.value) / scale : 0.0;
  r.truncation = rhs.truncation;
  r.warn = rhs.truncation_warning;
  return r;
}

}  // namespace

VoronoiResult voronoi_check(const VoronoiTestCase& tc, const CoefficientStream& stream, unsigned workers) {
  const cplx lhs = voronoi_lhs(tc, stream);
  return make_result(tc, lhs, voronoi_rhs(tc, stream, workers));
}

u64 voronoi_stream_length(u64 q_max, std::span<const double> y_scales, const SmoothWindow& window) {
  u64 length = 1;
  for (double y : y_scales) {
    length = std::max(length, static_cast<u64>(std::ceil(window.hi() * y)));
    length = std::max(length, dual_cutoff(q_max, y, window));
  }
  return length;
}

std::vector<VoronoiResult> voronoi_sweep(u64 q_max, std::span<const double> y_scales,
                                         const CoefficientStream& stream, unsigned workers) {
  std::vector<VoronoiResult> rows;
  for (double y : y_scales) {
    for (u64 q = 1; q <= q_max; ++q) {
      VoronoiTestCase base;
      base.q = q;
      base.y_scale = y;
      const u64 n_max = dual_cutoff(q, y, base.window);
      const auto transforms = dual_transforms(q, y, base.window, n_max, workers);
      for (u64 a = q == 1 ? 1 : 0; a < std::max<u64>(q, 2); ++a) {
        if (gcd(a, q) != 1) continue;
        VoronoiTestCase tc = base;
        tc.a = static_cast<i64>(a);
        rows.push_back(make_result(tc, voronoi_lhs(tc, stream), voronoi_rhs(tc, stream, transforms)));
      }
    }
  }
  return rows;
}

std::vector<double> decay_grid(double y_scale, double lo, double hi, std::size_t points) {
  if (points < 2 || !(lo > 0) || !(hi > lo)) throw std::invalid_argument("decay_grid: bad range");
  std::vector<double> grid(points);
  const double step = std::log(hi / lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i)) / y_scale;
  return grid;
}

SumReport transform_decay_check(double y_scale, std::span<const double> y_grid, const SmoothWindow& window) {
  SumReport report;
  report.name = "transform_decay";
  std::vector<double> ys(y_grid.begin(), y_grid.end());
  std::sort(ys.begin(), ys.end());
  std::vector<double> values(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) values[i] = std::abs(hankel_transform(ys[i], y_scale, window));

  std::vector<double> envelope(values.size());
  double running = 0;
  for (std::size_t i = values.size(); i-- > 0;) {
    running = std::max(running, values[i]);
    envelope[i] = running;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (envelope[i] <= 0) continue;
    const double lx = std::log(ys[i] * y_scale);
    const double ly = std::log(envelope[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++used;
  }
  double exponent = 0;
  if (used >= 2) {
    const double n = static_cast<double>(used);
    const double denom = n * sxx - sx * sx;
    if (denom > 0) exponent = -(n * sxy - sx * sy) / denom;
  } else {
    report.warnings.push_back("fewer than two nonzero transform values");
  }

  report.value = exponent;
  report.bound = 3.0;
  report.ratio = exponent / 3.0;
  report.pass = exponent >= 3.0;
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < ys.size(); ++i) points.push_back({ys[i] * y_scale, values[i] / y_scale});
  report.params = {{"Y", y_scale},
                   {"window", window.to_json()},
                   {"points_yY_absH_over_Y", points},
                   {"first_abs_h_over_y", values.empty() ? 0.0 : values.front() / y_scale},
                   {"last_abs_h_over_y", values.empty() ? 0.0 : values.back() / y_scale}};
  return report;
}

}  // namespace shiftconv
