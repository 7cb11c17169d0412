#include <doctest.h>

#include <cmath>
#include <sstream>

#include "shiftconv/circle.hpp"
#include "shiftconv/random.hpp"

using namespace shiftconv;

namespace {

// Sum of indicators over precomputed arcs [c - delta, c + delta).
struct NaiveKernel {
  std::vector<double> centers;
  double delta, height;

  explicit NaiveKernel(const ModuliSet& ms)
      : delta(ms.delta), height(1.0 / (2.0 * ms.delta * static_cast<double>(ms.phi_mass))) {
    for (u64 q : ms.moduli) {
      for (u64 a = 1; a <= q; ++a) {
        if (gcd(a, q) == 1) centers.push_back(static_cast<double>(a) / static_cast<double>(q));
      }
    }
  }
  double operator()(double x) const {
    u64 hits = 0;
    for (double c : centers) {
      const double l = c - delta;
      const double t = l + (x - l - std::floor(x - l));
      if (t < c + delta) ++hits;
    }
    return static_cast<double>(hits) * height;
  }
};

}  // namespace

TEST_CASE("moduli sets") {
  const auto restricted = build_moduli_set(40, 1.0, ModuliMode::TwoModThree);
  CHECK(restricted.moduli == std::vector<u64>{22, 23, 29, 34});
  CHECK(restricted.phi_mass == 10 + 22 + 28 + 16);

  const auto all = build_moduli_set(40, 1.0, ModuliMode::AllSquarefree);
  std::vector<u64> expected;
  for (u64 q = 21; q <= 40; ++q) {
    if (is_squarefree(q)) expected.push_back(q);
  }
  CHECK(all.moduli == expected);
  u64 phi = 0;
  for (u64 q : all.moduli) phi += euler_phi(q);
  CHECK(all.phi_mass == phi);
  CHECK(all.delta == doctest::Approx(std::pow(40.0, -1.5)));

  const auto empty = build_moduli_set(63, 0.5, ModuliMode::TwoModThree);
  CHECK(empty.empty());
  CHECK(empty.warnings.size() == 1);

  for (double q : {1000.0, 10000.0}) {
    const auto ms = build_moduli_set(q, 1.0, ModuliMode::AllSquarefree);
    const double ratio = static_cast<double>(ms.phi_mass) / (q * q);
    CHECK(ratio >= 0.1);
    CHECK(ratio <= 1.0);
  }
  CHECK_THROWS_AS(build_moduli_set(3, 1.0, ModuliMode::TwoModThree), std::invalid_argument);
  CHECK_THROWS_AS(build_moduli_set(100, 1.0, ModuliMode::TwoModThree, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_moduli_set({12}, 0.1), std::invalid_argument);

  std::ostringstream out;
  write_moduli_text(out, restricted);
  CHECK(out.str().find("\n22\n23\n29\n34\n") != std::string::npos);
}

TEST_CASE("kernel I: single modulus") {
  const auto ms = make_moduli_set({2}, 0.1);
  const auto f = eval_I(ms);
  CHECK(f.pieces() == 2);
  CHECK(f(0.5) == doctest::Approx(5.0));
  CHECK(f(0.41) == doctest::Approx(5.0));
  CHECK(f(0.61) == 0.0);
  CHECK(f(0.1) == 0.0);
  CHECK(f.integral() == doctest::Approx(1.0).epsilon(1e-14));

  const auto full = eval_I(make_moduli_set({2}, 0.5));
  CHECK(full.pieces() == 1);
  CHECK(full(0.0) == 1.0);
  CHECK(full(0.77) == 1.0);
  CHECK_THROWS_AS(eval_I(ModuliSet{}), std::invalid_argument);
}

TEST_CASE("kernel I: exact mass, positivity, naive agreement") {
  CounterRng rng(11);
  for (double q : {20.0, 57.0, 200.0}) {
    for (double expo : {1.1, 1.5, 1.9}) {
      const auto ms = build_moduli_set(q, 1.0, ModuliMode::AllSquarefree, std::pow(q, -expo));
      const auto f = eval_I(ms);
      CHECK(std::abs(f.integral() - 1.0) <= 1e-12);
      for (double v : f.values()) CHECK(v >= 0.0);
      for (std::size_t i = 1; i < f.pieces(); ++i) CHECK(f.values()[i] != f.values()[i - 1]);
      CHECK(f.pieces() <= 2 * ms.phi_mass);
      const NaiveKernel naive(ms);
      const u64 samples = q < 30 ? 1000000 : 20000;
      u64 mismatches = 0;
      for (u64 i = 0; i < samples; ++i) {
        const double x = rng.uniform01();
        if (f(x) != naive(x)) ++mismatches;
      }
      CHECK(mismatches == 0);
      CHECK(f(0.3) == eval_I_naive(ms, 0.3));
      for (u64 qq : ms.moduli) {
        CHECK(f(1.0 / static_cast<double>(qq)) >= 1.0 / (2.0 * ms.delta * ms.phi_mass) * (1 - 1e-12));
      }
    }
  }
}

TEST_CASE("variance") {
  const auto none = variance(build_moduli_set(63, 0.5, ModuliMode::TwoModThree));
  CHECK(none.value.real() == 1.0);
  CHECK(none.ratio == 0.0);
  CHECK(!none.warnings.empty());

  const auto rep = variance(build_moduli_set(1000, 1.0, ModuliMode::AllSquarefree));
  MESSAGE("variance ratio Q=1000: " << rep.ratio);
  CHECK(rep.ratio <= 100.0);
  CHECK(rep.params["integral_I"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

  const double q = 400;
  const auto base = variance(build_moduli_set(q, 1.0, ModuliMode::AllSquarefree, std::pow(q, -1.6)));
  const auto doubled = variance(build_moduli_set(q, 1.0, ModuliMode::AllSquarefree, 2 * std::pow(q, -1.6)));
  CHECK(doubled.ratio <= 4 * base.ratio);
  CHECK(base.ratio <= 4 * doubled.ratio);

  // Growing the set (2 mod 3 subset -> all squarefree) does not inflate the ratio by more than 4x.
  const auto sub = variance(build_moduli_set(q, 1.0, ModuliMode::TwoModThree));
  const auto sup = variance(build_moduli_set(q, 1.0, ModuliMode::AllSquarefree));
  CHECK(sup.ratio <= 4 * sub.ratio);
}

TEST_CASE("Ramanujan sums") {
  for (u64 q = 1; q < 40; ++q) {
    if (!is_squarefree(q)) continue;
    for (i64 t = -20; t < 20; ++t) {
      double direct = 0;
      for (u64 a = 1; a <= q; ++a) {
        if (gcd(a, q) == 1) direct += std::cos(2 * M_PI * a * t / q);
      }
      CHECK(ramanujan_sum(q, t) == doctest::Approx(direct).scale(1.0));
    }
  }
}

TEST_CASE("D*_h quadrature") {
  const auto gl2 = lambda_gl2(8000);
  const auto gl3 = sym2_lift(gl2, 8000);
  const ConvolutionInputs in{gl3, gl2};
  const double x = 300;
  const auto spec = shifted_conv_all(x, in);

  // I = 1 reproduces D_h.
  const auto cover = make_moduli_set({2}, 0.5);
  for (i64 h : {0, 1, 17, -40}) {
    const cplx ds = dstar_h(h, x, cover, in);
    CHECK(std::abs(ds - spec.at(h)) <= 1e-9 * (1.0 + std::abs(spec.at(h))));
    CHECK(std::abs(dstar_h_fourier(h, cover, spec) - spec.at(h)) <= 1e-9 * (1.0 + std::abs(spec.at(h))));
  }

  const auto ms = build_moduli_set(std::pow(x, 6.0 / 11.0), 1.0, ModuliMode::AllSquarefree, 1.0 / x);
  for (i64 h : {1, 5, 30}) {
    const cplx quad = dstar_h(h, x, ms, in);
    const cplx four = dstar_h_fourier(h, ms, spec);
    CHECK(std::abs(quad - four) <= 1e-8 * (1.0 + std::abs(four)));
    // Real streams and a kernel symmetric under x -> -x make D*_h real.
    CHECK(std::abs(quad.imag()) <= 1e-8 * (1.0 + std::abs(quad)));
  }
  const cplx far = dstar_h(static_cast<i64>(3 * x) + 10, x, ms, in);
  MESSAGE("|D*_h| beyond the support: " << std::abs(far));
  CHECK(std::abs(far) < 0.05 * x);

  const auto gap = dstar_gap(1, x, ms, in);
  CHECK(std::isfinite(gap.ratio));
  MESSAGE("gap ratio at X=300: " << gap.ratio);
}
