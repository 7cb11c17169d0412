#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "shiftconv/exp_sums.hpp"

using namespace shiftconv;

namespace {

using lcplx = std::complex<long double>;

lcplx e_ld(long double num, long double den) {
  const long double t = 2.0L * std::numbers::pi_v<long double> * std::fmod(num, den) / den;
  return {std::cos(t), std::sin(t)};
}

// Brute-force oracles written without the library's tables or contexts.
lcplx naive_kloosterman(i64 m, i64 n, i64 c) {
  lcplx s = 0;
  for (i64 x = 0; x < c; ++x) {
    if (std::gcd(x, c) != 1 && c != 1) continue;
    i64 xbar = 0;
    for (i64 y = 0; y < c; ++y) {
      if ((x * y) % c == 1 % c) {
        xbar = y;
        break;
      }
    }
    const i64 arg = ((m * x + n * xbar) % c + c) % c;
    s += e_ld(static_cast<long double>(arg), static_cast<long double>(c));
  }
  return s;
}

i64 naive_inv(i64 x, i64 c) {
  for (i64 y = 0; y < c; ++y) {
    if ((x * y) % c == 1 % c) return y;
  }
  return 0;
}

lcplx naive_t(i64 a, i64 b, i64 m, i64 c) {
  lcplx s = 0;
  for (i64 x = 0; x < c; ++x) {
    if (std::gcd(x, c) != 1 && c != 1) continue;
    const i64 xbar = naive_inv(x, c);
    const i64 arg = (((-m * x) % c) + c) % c;
    s += naive_kloosterman(xbar + a, -b, c) * e_ld(static_cast<long double>(arg), static_cast<long double>(c));
  }
  return s / static_cast<long double>(c);
}

lcplx naive_s(i64 h, i64 n, i64 m, i64 c, i64 d) {
  lcplx s = 0;
  for (i64 x = 0; x < c; ++x) {
    if (std::gcd(x, c) != 1 && c != 1) continue;
    const i64 xbar = naive_inv(x, c);
    const i64 arg = (((h * xbar - n * x) % c) + c) % c;
    s += naive_kloosterman(m, x, d) * e_ld(static_cast<long double>(arg), static_cast<long double>(c));
  }
  return s;
}

double diff(cplx a, lcplx b) {
  return std::abs(std::complex<long double>(a.real(), a.imag()) - b);
}

}  // namespace

TEST_CASE("kloosterman small values") {
  CHECK(kloosterman(0, 0, 30).value.real() == doctest::Approx(8.0));
  CHECK(kloosterman(1, 1, 2).value.real() == doctest::Approx(1.0));
  CHECK(kloosterman(1, 1, 3).value.real() == doctest::Approx(-1.0));
  CHECK(kloosterman(5, 7, 1).value.real() == doctest::Approx(1.0));
  CHECK(kloosterman_normalized(1, 3) == doctest::Approx(-1.0 / std::sqrt(3.0)));
  CHECK_THROWS_AS(kloosterman_normalized(1, 12), std::invalid_argument);
  CHECK_THROWS_AS(kloosterman_normalized(1, 2), std::invalid_argument);
}

TEST_CASE("kloosterman matches brute force, is real and symmetric") {
  for (i64 c = 1; c <= 40; ++c) {
    for (i64 m = -3; m < 8; ++m) {
      for (i64 n = 0; n < 6; ++n) {
        const auto v = kloosterman(m, n, static_cast<u64>(c));
        CHECK(diff(v.value, naive_kloosterman(m, n, c)) < 1e-10);
        CHECK(std::abs(v.value.imag()) < 1e-9 * static_cast<double>(v.term_count + 1));
        CHECK(std::abs(v.value) <= static_cast<double>(v.term_count) + 1e-9);
        CHECK(std::abs(v.value - kloosterman(n, m, static_cast<u64>(c)).value) < 1e-9);
      }
    }
  }
}

TEST_CASE("Ramanujan sum at n = 0") {
  for (u64 c = 1; c < 60; ++c) {
    for (i64 m = 0; m < 10; ++m) {
      const u64 g = std::gcd(static_cast<u64>(m), c);
      const u64 cg = c / g;
      const double expected = mobius(cg) * static_cast<double>(euler_phi(c)) / static_cast<double>(euler_phi(cg));
      CHECK(kloosterman(m, 0, c).value.real() == doctest::Approx(expected));
    }
  }
}

TEST_CASE("Weil bound and Kl bound") {
  for (u64 p : primes_up_to(400)) {
    if (p < 3) continue;
    const auto row = kloosterman_row(1, p);
    for (double s : row) CHECK(std::abs(s) <= 2.0 * std::sqrt(static_cast<double>(p)) + 1e-9);
  }
  for (u64 q : {15ULL, 30ULL, 105ULL, 1155ULL}) {
    for (i64 n = 0; n < static_cast<i64>(q); n += 7) {
      CHECK(std::abs(kloosterman_normalized(n, q)) <= static_cast<double>(divisor_count(q)) + 1e-9);
    }
  }
}

TEST_CASE("kloosterman row and table agree with enumeration") {
  for (u64 c : {1ULL, 2ULL, 7ULL, 12ULL, 30ULL, 49ULL}) {
    const KloostermanTable table(c);
    for (i64 v = 0; v < static_cast<i64>(c); ++v) {
      const auto row = kloosterman_row(v, c);
      for (i64 u = 0; u < static_cast<i64>(c); ++u) {
        const double direct = kloosterman(u, v, c).value.real();
        CHECK(row[u] == doctest::Approx(direct).epsilon(1e-9).scale(1.0));
        CHECK(table(u, v) == doctest::Approx(direct).epsilon(1e-9).scale(1.0));
      }
    }
  }
}

TEST_CASE("baby sums against brute force") {
  CHECK(std::abs(baby_t(3, 4, 5, 1).value - cplx{1.0, 0.0}) < 1e-15);
  CHECK(baby_s(0, 0, 0, 30, 1).value.real() == doctest::Approx(8.0));
  CHECK_THROWS_AS(baby_s(0, 0, 0, 15, 4), std::invalid_argument);

  for (i64 c : {1, 5, 6, 12, 15}) {
    for (i64 a = 0; a < 3; ++a) {
      for (i64 b = 0; b < 3; ++b) {
        for (i64 m = 0; m < 3; ++m) {
          const auto t = baby_t(a, b, m, static_cast<u64>(c));
          CHECK(diff(t.value, naive_t(a, b, m, c)) < 1e-10);
          CHECK(std::abs(t.value) <= static_cast<double>(t.term_count) + 1e-9);
          const auto s = baby_s(a, b, m, static_cast<u64>(c), static_cast<u64>(c));
          CHECK(diff(s.value, naive_s(a, b, m, c, c)) < 1e-9);
        }
      }
    }
  }
  for (i64 m = 0; m < 7; ++m) {
    const auto row = baby_t_row(2, 3, 7);
    CHECK(std::abs(row[m] - baby_t(2, 3, m, 7).value) < 1e-10);
  }
  CHECK(diff(baby_s(2, 5, 1, 30, 6).value, naive_s(2, 5, 1, 30, 6)) < 1e-9);
}

TEST_CASE("S-factorization: worked instance at (15, 3)") {
  const auto lhs = baby_s(1, 1, 1, 15, 3).value;
  const i64 inv3 = naive_inv(3, 5);
  const i64 inv5 = naive_inv(5, 3);
  const lcplx rhs = 3.0L * naive_kloosterman(1, -(inv3 * inv3 % 5), 5) * naive_t(inv5, inv5, 1, 3);
  CHECK(diff(lhs, rhs) < 1e-9);
  CHECK(verify_s_factorization(1, 1, 1, 3, 5).pass == true);
}

TEST_CASE("S-factorization exhaustive and random") {
  CounterRng rng(0);
  const auto s = sweep_s_factorization(3, 5, true, 0, rng);
  CHECK(s.checked == 15 * 15 * 15);
  CHECK(s.failures == 0);
  const auto r = sweep_s_factorization(2, 11, false, 50, rng);
  CHECK(r.failures == 0);
  CHECK_THROWS_AS(verify_s_factorization(1, 1, 1, 3, 6), std::invalid_argument);
  CHECK_THROWS_AS(verify_s_factorization(1, 1, 1, 2, 9), std::invalid_argument);
}

TEST_CASE("T multiplicativity") {
  CounterRng rng(1);
  const auto s = sweep_t_multiplicativity(3, 5, true, 0, rng);
  CHECK(s.failures == 0);
  CHECK(s.checked == 15 * 15 * 15);
  for (const auto& [d, l] : coprime_factor_pairs(42)) {
    CHECK(sweep_t_multiplicativity(d, l, false, 10, rng).failures == 0);
    CHECK(sweep_s_factorization(d, l, false, 10, rng).failures == 0);
  }
}

TEST_CASE("coprime_factor_pairs") {
  const auto pairs = coprime_factor_pairs(6);
  // c = 1, 2, 3, 5 contribute 1, 2, 2, 2 pairs; c = 6 contributes 4.
  CHECK(pairs.size() == 1 + 2 + 2 + 2 + 4);
  for (const auto& [d, l] : pairs) CHECK(std::gcd(d, l) == 1);
}

TEST_CASE("Fourier transform mod p") {
  for (u64 p : primes_up_to(97)) {
    std::vector<cplx> delta(p, cplx{});
    delta[0] = 1.0;
    for (const auto& z : fourier_transform_modp(delta)) {
      CHECK(std::abs(z - 1.0 / std::sqrt(static_cast<double>(p))) < 1e-12);
    }
    CounterRng rng(p);
    std::vector<cplx> f(p);
    for (auto& z : f) z = {rng.uniform01() - 0.5, rng.uniform01() - 0.5};
    const auto ff = fourier_transform_modp(fourier_transform_modp(f));
    double norm_f = 0, norm_hat = 0;
    const auto fh = fourier_transform_modp(f);
    for (u64 x = 0; x < p; ++x) {
      CHECK(std::abs(ff[x] - f[(p - x) % p]) < 1e-12);
      norm_f += std::norm(f[x]);
      norm_hat += std::norm(fh[x]);
    }
    CHECK(norm_hat == doctest::Approx(norm_f).epsilon(1e-12));
  }
}

TEST_CASE("T correlations") {
  const auto diag = correlation_t(1, 1, 1, 1, 101);
  CHECK(diag.diagonal);
  CHECK(std::abs(diag.rho.imag()) < 1e-10);
  CHECK(diag.rho.real() > 0);
  CHECK(diag.rho.real() > 0.3);
  CHECK(diag.rho.real() < 3.0);
  CHECK(correlation_t(1, 1, 2, 1, 101).normalized.real() <= 10.0);
  CHECK(correlation_t(1, 1, 1, 2, 101).normalized.real() <= 10.0);
  CHECK_THROWS_AS(correlation_t(1, 0, 1, 1, 101), std::invalid_argument);
  CHECK_THROWS_AS(correlation_t(1, 1, 1, 1, 100), std::invalid_argument);

  // Direct sum over enumerated T values.
  const u64 p = 29;
  lcplx acc = 0;
  for (i64 y = 0; y < static_cast<i64>(p); ++y) {
    acc += naive_t(3, 4, y, p) * std::conj(naive_t(5, 4, y, p));
  }
  CHECK(diff(correlation_t(3, 4, 5, 4, p).rho, acc / static_cast<long double>(p)) < 1e-10);

  CHECK(cube_map_is_bijective(101));
  CHECK_FALSE(cube_map_is_bijective(103));

  const auto sweep = correlation_sweep(10, 120, 3, 0, 1);
  CHECK(sweep.primes > 0);
  CHECK(sweep.max_off_diagonal <= 10.0);
  CHECK(sweep.min_diagonal >= 0.3);
  CHECK(sweep.max_diagonal <= 3.0);
}

TEST_CASE("incomplete sums") {
  const std::vector<cplx> one{1.0};
  const u64 q = 105;
  const auto full = incomplete_sum(KloostermanTrace{q}, 1, q, one);
  lcplx oracle = 0;
  for (i64 n = 1; n <= static_cast<i64>(q); ++n) oracle += naive_kloosterman(n, 1, q);
  CHECK(diff(full.value, oracle / std::sqrt(static_cast<long double>(q))) < 1e-9);
  // Orthogonality collapses the complete sum to sqrt(q) times the n=... term: sum_n S(n,1;q) = 0 unless q = 1.
  CHECK(std::abs(full.value) < 1e-9);

  CHECK(incomplete_sum(KloostermanTrace{q}, 5, 4, one).value == cplx{});
  const std::vector<cplx> too_big{2.0};
  CHECK_THROWS_AS(incomplete_sum(KloostermanTrace{q}, 1, 3, too_big), std::invalid_argument);
  CHECK_THROWS_AS(incomplete_sum(KloostermanTrace{12}, 1, 3, one), std::invalid_argument);

  CounterRng rng(7);
  for (u64 qq : {1001ULL, 2 * 5 * 11 * 17ULL, 3 * 7 * 13 * 19ULL}) {
    const auto pv = polya_vinogradov_sweep(qq, 200, rng);
    CHECK(pv.ratio < 2.0);
  }
}

TEST_CASE("exponent pairs") {
  const auto triv = ExponentPair::trivial();
  CHECK(triv.admissible());
  CHECK(exponent_pair_bound(triv, 1e4, 37.0, 3.0, 0.2) == doctest::Approx(37.0));
  CHECK(exponent_pair_bound(ExponentPair::polya_vinogradov(), 1e4, 50.0, 1.0, 1.0) ==
        doctest::Approx(100.0));
  CHECK(exponent_pair_bound(ExponentPair::weyl_type(), 1e4, 1e2, 1.0, 1.0) ==
        doctest::Approx(std::pow(10.0, 9.0 / 5.0)));
  CHECK(ExponentPair::weyl_type().admissible());
  CHECK(ExponentPair::third().admissible());
  CHECK_THROWS_AS(exponent_pair_bound(triv, 10.0, 10.0, 1.0, 1.0), std::invalid_argument);

  CounterRng rng(3);
  const std::vector<cplx> w{1.0, 0.5, -0.25};
  const auto rep = exponent_pair_measurement(KloostermanTrace{1001}, ExponentPair::polya_vinogradov(), w, 30, rng);
  CHECK(rep.ratio > 0.0);
  CHECK(std::isfinite(rep.ratio));
}
