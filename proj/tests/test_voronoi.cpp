#include <doctest.h>

#include <cmath>
#include <vector>

#include "shiftconv/voronoi.hpp"

using namespace shiftconv;

namespace {

const CoefficientStream& tau_stream() {
  static const CoefficientStream s = lambda_gl2(4000);
  return s;
}

// Power series in long double; fine for x <= 20.
double series_j(unsigned order, double x) {
  long double term = 1;
  for (unsigned k = 1; k <= order; ++k) term *= static_cast<long double>(x) / 2 / k;
  long double sum = term;
  const long double z2 = static_cast<long double>(x) * x / 4;
  for (int m = 1; m < 200; ++m) {
    term *= -z2 / (m * static_cast<long double>(m + order));
    sum += term;
    if (std::fabs(term) < 1e-25L) break;
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("bessel values") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  for (unsigned k = 1; k <= 50; k += 7) CHECK(bessel_j(k, 0.0) == 0.0);
  CHECK_THROWS_AS(bessel_j(51, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_j(0, -1.0), std::invalid_argument);

  for (unsigned k : {0u, 1u, 5u, 11u, 30u}) {
    for (double x = 0.25; x <= 20.0; x += 0.75) CHECK(std::abs(bessel_j(k, x) - series_j(k, x)) <= 1e-10);
  }
}

TEST_CASE("bessel recurrence and ODE residual") {
  for (unsigned k = 1; k < 50; k += 4) {
    for (double x = 0.5; x <= 1000.0; x *= 1.37) {
      const double lhs = bessel_j(k - 1, x) + bessel_j(k + 1, x);
      CHECK(std::abs(lhs - 2.0 * k / x * bessel_j(k, x)) <= 1e-8);
    }
  }
  // Fourth-order central differences.
  const double step = 1e-2;
  for (double x = 0.5; x <= 200.0; x += 1.3) {
    auto f = [](double t) { return bessel_j(0, t); };
    const double d1 = (f(x - 2 * step) - 8 * f(x - step) + 8 * f(x + step) - f(x + 2 * step)) / (12 * step);
    const double d2 = (-f(x - 2 * step) + 16 * f(x - step) - 30 * f(x) + 16 * f(x + step) - f(x + 2 * step)) /
                      (12 * step * step);
    CHECK(std::abs(d2 + d1 / x + f(x)) <= 1e-8);
  }
}

TEST_CASE("test case validation") {
  VoronoiTestCase tc;
  tc.q = 6;
  tc.a = 3;
  CHECK_THROWS_AS(tc.validate(), std::invalid_argument);
  tc.a = -1;
  CHECK_NOTHROW(tc.validate());
  tc.q = 0;
  CHECK_THROWS_AS(tc.validate(), std::invalid_argument);
}

TEST_CASE("lhs basics") {
  const auto& s = tau_stream();
  VoronoiTestCase tc;
  tc.q = 1;
  tc.y_scale = 500;
  double plain = 0;
  for (u64 n = 500; n <= 1000; ++n) plain += s(n) * tc.h(static_cast<double>(n));
  CHECK(std::abs(voronoi_lhs(tc, s) - cplx(plain, 0)) <= 1e-12);

  tc.q = 7;
  tc.a = 3;
  const cplx pos = voronoi_lhs(tc, s);
  tc.a = -3;
  CHECK(std::abs(voronoi_lhs(tc, s) - std::conj(pos)) <= 1e-12);

  tc.window = SmoothWindow::zero();
  CHECK(voronoi_lhs(tc, s) == cplx{});
  CHECK(voronoi_rhs(tc, s).value == cplx{});

  VoronoiTestCase far;
  far.y_scale = 3000;
  CHECK_THROWS_AS(voronoi_lhs(far, s), std::out_of_range);
}

TEST_CASE("identity holds for q <= 10") {
  const std::vector<double> ys{500, 1000, 2000};
  const auto& s = tau_stream();
  REQUIRE(voronoi_stream_length(10, ys) <= s.size());
  const auto rows = voronoi_sweep(10, ys, s);
  CHECK(rows.size() == 3 * 32);
  for (const auto& r : rows) {
    CAPTURE(r.q);
    CAPTURE(r.a);
    CAPTURE(r.y_scale);
    CHECK(r.rel_err <= 1e-4);
    CHECK_FALSE(r.warn);
  }
}

TEST_CASE("single case agrees with the sweep") {
  VoronoiTestCase tc;
  tc.q = 3;
  tc.a = 1;
  tc.y_scale = 1000;
  const auto r = voronoi_check(tc, tau_stream(), 2);
  CHECK(r.rel_err <= 1e-4);
  const auto row = r.to_json();
  CHECK(row["q"] == 3);
  CHECK(row.contains("rel_err"));
}

TEST_CASE("truncation") {
  const auto& s = tau_stream();
  VoronoiTestCase tc;
  tc.q = 5;
  tc.a = 2;
  tc.y_scale = 1000;
  const cplx lhs = voronoi_lhs(tc, s);
  std::vector<double> errors;
  for (u64 n : {10u, 20u, 40u, 80u, 160u}) {
    tc.truncation = n;
    const auto rhs = voronoi_rhs(tc, s);
    CHECK(rhs.truncation_warning);
    errors.push_back(std::abs(rhs.value - lhs));
  }
  CHECK(errors.back() < errors.front() * 1e-3);

  const double head = 100.0 * static_cast<double>(tc.q * tc.q) / tc.y_scale;
  const auto h = dual_transforms(tc.q, tc.y_scale, tc.window, static_cast<u64>(120 * head));
  double largest = 0;
  for (u64 n = 1; n <= h.size(); ++n) largest = std::max(largest, std::abs(s(n) * h[n - 1]));
  for (auto n = static_cast<u64>(80 * head); n <= h.size(); ++n) CHECK(std::abs(s(n) * h[n - 1]) <= 1e-8 * largest);
}

TEST_CASE("transform decay") {
  for (double y : {500.0, 1000.0}) {
    const auto report = transform_decay_check(y, decay_grid(y));
    CHECK(report.pass.value());
    CHECK(report.value.real() >= 3.0);
    CHECK(report.params["last_abs_h_over_y"].get<double>() <= 1e-6);
  }
  // flat regime: |H(y)| <= C Y for yY <= 0.01
  for (double yy : {1e-4, 1e-3, 1e-2}) CHECK(std::abs(hankel_transform(yy / 1000, 1000)) <= 1000.0);
}
