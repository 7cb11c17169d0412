#include "shiftconv/arith.hpp"

#include <stdexcept>
#include <string>

namespace shiftconv {

namespace {

// Primes below 2^15 cover trial division of every n < 2^30 > 10^9.
const std::vector<u64>& small_primes() {
  static const std::vector<u64> table = primes_up_to(1u << 15);
  return table;
}

}  // namespace

u64 pow_mod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

u64 gcd(u64 a, u64 b) {
  while (b != 0) {
    const u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u64 mod_inv(i64 a, u64 m) {
  if (m < 2) throw std::invalid_argument("mod_inv: modulus must be >= 2");
  const u64 r = mod_reduce(a, m);
  // Extended Euclid on signed 128-bit to stay exact for m up to 2^63.
  __int128 old_r = r, cur_r = m;
  __int128 old_s = 1, cur_s = 0;
  while (cur_r != 0) {
    const __int128 q = old_r / cur_r;
    const __int128 nr = old_r - q * cur_r;
    old_r = cur_r;
    cur_r = nr;
    const __int128 ns = old_s - q * cur_s;
    old_s = cur_s;
    cur_s = ns;
  }
  if (old_r != 1) {
    throw std::domain_error("mod_inv: " + std::to_string(a) + " is not invertible modulo " +
                            std::to_string(m));
  }
  __int128 s = old_s % static_cast<__int128>(m);
  if (s < 0) s += m;
  return static_cast<u64>(s);
}

u64 Factorization::totient() const {
  u64 phi = 1;
  for (u64 p : primes_) phi *= (p - 1);
  return phi;
}

std::optional<Factorization> squarefree_factor(u64 n) {
  if (n == 0) return std::nullopt;
  std::vector<u64> primes;
  u64 rest = n;
  for (u64 p : small_primes()) {
    if (p * p > rest) break;
    if (rest % p == 0) {
      rest /= p;
      if (rest % p == 0) return std::nullopt;
      primes.push_back(p);
    }
  }
  if (rest > 1) {
    // Beyond the table, fall back to odd trial division.
    u64 p = small_primes().back() + 2;
    while (p * p <= rest) {
      if (rest % p == 0) {
        rest /= p;
        if (rest % p == 0) return std::nullopt;
        primes.push_back(p);
      }
      p += 2;
    }
    if (rest > 1) primes.push_back(rest);
  }
  return Factorization(n, std::move(primes));
}

Factorization require_squarefree(u64 n) {
  auto f = squarefree_factor(n);
  if (!f) throw std::invalid_argument(std::to_string(n) + " is not squarefree");
  return *std::move(f);
}

bool is_squarefree(u64 n) { return squarefree_factor(n).has_value(); }

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : small_primes()) {
    if (p * p > n) return true;
    if (n % p == 0) return n == p;
  }
  for (u64 d = small_primes().back() + 2; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<u64> crt_split(i64 x, const Factorization& f) {
  std::vector<u64> out;
  out.reserve(f.size());
  for (u64 p : f.primes()) out.push_back(mod_reduce(x, p));
  return out;
}

u64 crt_combine(std::span<const u64> residues, const Factorization& f) {
  if (residues.size() != f.size()) {
    throw std::invalid_argument("crt_combine: residue count does not match factorization");
  }
  const u64 m = f.modulus();
  if (m == 1) return 0;
  u64 x = 0;
  for (std::size_t i = 0; i < residues.size(); ++i) {
    const u64 p = f.primes()[i];
    const u64 cofactor = m / p;
    const u64 coeff = mul_mod(residues[i] % p, mod_inv(static_cast<i64>(cofactor % p), p), p);
    x = add_mod(x, mul_mod(coeff, cofactor, m), m);
  }
  return x;
}

u64 euler_phi(u64 n) {
  u64 result = n;
  u64 rest = n;
  for (u64 p = 2; p * p <= rest; ++p) {
    if (rest % p == 0) {
      while (rest % p == 0) rest /= p;
      result -= result / p;
    }
  }
  if (rest > 1) result -= result / rest;
  return result;
}

int mobius(u64 n) {
  auto f = squarefree_factor(n);
  return f ? f->mobius() : 0;
}

u64 divisor_count(u64 n) {
  u64 count = 1;
  u64 rest = n;
  for (u64 p = 2; p * p <= rest; ++p) {
    u64 e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    count *= (e + 1);
  }
  if (rest > 1) count *= 2;
  return count;
}

std::vector<u64> primes_up_to(u64 limit) {
  std::vector<u64> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (u64 i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

}  // namespace shiftconv
