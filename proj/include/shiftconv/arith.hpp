#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace shiftconv {

using i64 = std::int64_t;
using u64 = std::uint64_t;

/// Reduce `a` into [0, m).  Negative inputs wrap.
constexpr u64 mod_reduce(i64 a, u64 m) {
  const i64 sm = static_cast<i64>(m);
  i64 r = a % sm;
  return static_cast<u64>(r < 0 ? r + sm : r);
}

constexpr u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

constexpr u64 add_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<unsigned __int128>(a) + b) % m);
}

u64 pow_mod(u64 base, u64 exp, u64 m);

u64 gcd(u64 a, u64 b);

/// Inverse of `a` modulo `m`.  Throws std::domain_error when gcd(a, m) != 1
/// and std::invalid_argument when m < 2.
u64 mod_inv(i64 a, u64 m);

/// Distinct prime factors of a squarefree modulus, in increasing order.
class Factorization {
 public:
  Factorization() = default;

  u64 modulus() const { return modulus_; }
  std::span<const u64> primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }

  /// Number of divisors, 2^(number of primes).
  u64 divisor_count() const { return u64{1} << primes_.size(); }
  u64 totient() const;
  int mobius() const { return primes_.size() % 2 == 0 ? 1 : -1; }

 private:
  friend std::optional<Factorization> squarefree_factor(u64 n);
  Factorization(u64 n, std::vector<u64> primes) : modulus_(n), primes_(std::move(primes)) {}

  u64 modulus_ = 1;
  std::vector<u64> primes_;
};

/// Trial division against a small-prime table; n up to 10^9 is fast, larger
/// values still work but are not the intended use.  Returns nullopt when
/// n is not squarefree.
std::optional<Factorization> squarefree_factor(u64 n);

/// Like squarefree_factor but throws std::invalid_argument on failure.
Factorization require_squarefree(u64 n);

bool is_squarefree(u64 n);
bool is_prime(u64 n);

/// x mod p_i for each prime of f.
std::vector<u64> crt_split(i64 x, const Factorization& f);

/// Inverse of crt_split: the unique x in [0, f.modulus()) with the given residues.
u64 crt_combine(std::span<const u64> residues, const Factorization& f);

u64 euler_phi(u64 n);
int mobius(u64 n);
u64 divisor_count(u64 n);

/// All primes <= limit (sieve of Eratosthenes).
std::vector<u64> primes_up_to(u64 limit);

}  // namespace shiftconv
