#include <doctest.h>

#include <numeric>
#include <stdexcept>

#include "shiftconv/arith.hpp"

using namespace shiftconv;

TEST_CASE("mod_inv") {
  CHECK(mod_inv(1, 7) == 1);
  CHECK(mod_inv(3, 7) == 5);
  CHECK(mod_inv(-4, 7) == 5);
  CHECK_THROWS_AS(mod_inv(2, 4), std::domain_error);
  CHECK_THROWS_AS(mod_inv(1, 1), std::invalid_argument);

  for (u64 m = 2; m < 200; ++m) {
    for (u64 a = 1; a < m; ++a) {
      if (std::gcd(a, m) != 1) continue;
      CHECK(mul_mod(a, mod_inv(static_cast<i64>(a), m), m) == 1);
    }
  }
  const u64 big = (u64{1} << 61) - 1;
  CHECK(mul_mod(123456789, mod_inv(123456789, big), big) == 1);
}

TEST_CASE("squarefree_factor") {
  auto f = squarefree_factor(15);
  REQUIRE(f);
  CHECK(f->primes().size() == 2);
  CHECK(f->primes()[0] == 3);
  CHECK(f->primes()[1] == 5);
  CHECK(f->totient() == 8);
  CHECK(f->mobius() == 1);

  auto one = squarefree_factor(1);
  REQUIRE(one);
  CHECK(one->size() == 0);
  CHECK(one->divisor_count() == 1);

  CHECK_FALSE(squarefree_factor(12));
  CHECK_FALSE(squarefree_factor(0));
  CHECK_THROWS_AS(require_squarefree(49), std::invalid_argument);

  const u64 big = 1000003ULL * 999983ULL;
  auto g = squarefree_factor(big);
  REQUIRE(g);
  CHECK(g->size() == 2);
}

TEST_CASE("squarefree_factor agrees with trial-division oracle") {
  for (u64 n = 1; n < 5000; ++n) {
    bool sf = true;
    for (u64 d = 2; d * d <= n; ++d) {
      if (n % (d * d) == 0) sf = false;
    }
    CHECK(is_squarefree(n) == sf);
    if (!sf) continue;
    u64 prod = 1;
    const auto f = squarefree_factor(n);
    for (u64 p : f->primes()) {
      CHECK(is_prime(p));
      prod *= p;
    }
    CHECK(prod == n);
    CHECK(euler_phi(n) == squarefree_factor(n)->totient());
  }
}

TEST_CASE("crt round trip") {
  const auto f = require_squarefree(15);
  const auto r = crt_split(7, f);
  CHECK(r == std::vector<u64>{1, 2});
  CHECK(crt_split(0, f) == std::vector<u64>{0, 0});

  const auto g = require_squarefree(2 * 3 * 5 * 7 * 11 * 13);
  for (i64 x = 0; x < static_cast<i64>(g.modulus()); x += 7) {
    CHECK(crt_combine(crt_split(x, g), g) == static_cast<u64>(x));
  }
  const std::vector<u64> bad{1};
  CHECK_THROWS_AS(crt_combine(bad, f), std::invalid_argument);
}

TEST_CASE("multiplicative functions") {
  CHECK(mobius(1) == 1);
  CHECK(mobius(30) == -1);
  CHECK(mobius(12) == 0);
  CHECK(divisor_count(12) == 6);
  CHECK(euler_phi(12) == 4);
  CHECK(primes_up_to(30).size() == 10);
}
