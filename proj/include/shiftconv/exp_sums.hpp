#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "shiftconv/arith.hpp"
#include "shiftconv/random.hpp"
#include "shiftconv/rational.hpp"
#include "shiftconv/report.hpp"

namespace shiftconv {

using cplx = std::complex<double>;

/// A complete (or incomplete) exponential sum together with the number of
/// summands accumulated, so that |value| <= term_count always holds.
struct ExpSumValue {
  cplx value{};
  u64 modulus = 1;
  u64 term_count = 0;
};

/// Precomputed e(j/c) for j in [0, c).
class TwiddleTable {
 public:
  explicit TwiddleTable(u64 c);

  u64 modulus() const { return c_; }
  const cplx& operator[](u64 j) const { return table_[j]; }
  const cplx& at(i64 j) const { return table_[mod_reduce(j, c_)]; }

 private:
  u64 c_;
  std::vector<cplx> table_;
};

/// Units modulo c with their inverses and twiddles.  Modulus 1 has the single
/// unit 0 (the empty-modulus convention: one term with trivial character).
class ModulusContext {
 public:
  explicit ModulusContext(u64 c);

  u64 modulus() const { return c_; }
  const TwiddleTable& twiddle() const { return twiddle_; }
  std::span<const u64> units() const { return units_; }
  /// Inverse of a unit x; 0 for non-units.
  u64 inverse(u64 x) const { return inverse_[x]; }
  bool is_unit(u64 x) const { return c_ == 1 || inverse_[x] != 0; }

 private:
  u64 c_;
  TwiddleTable twiddle_;
  std::vector<u64> units_;
  std::vector<u64> inverse_;
};

/// Neumaier-compensated complex accumulator.
class CompensatedSum {
 public:
  void add(cplx z) {
    add_part(re_, re_c_, z.real());
    add_part(im_, im_c_, z.imag());
  }
  cplx value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_part(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double re_ = 0, im_ = 0, re_c_ = 0, im_c_ = 0;
};

// --- complete sums -----------------------------------------------------------

/// S(m, n; c) = sum over units x mod c of e((m x + n xbar)/c), by enumeration.
ExpSumValue kloosterman(i64 m, i64 n, u64 c);

/// Kl(n, q) = S(n, 1; q) / sqrt(q) for squarefree q >= 3.
double kloosterman_normalized(i64 n, u64 q);

/// Table of S(a, b; c) for all a, b mod c (O(c^3) to build).
class KloostermanTable {
 public:
  explicit KloostermanTable(u64 c);
  explicit KloostermanTable(const ModulusContext& ctx);

  u64 modulus() const { return c_; }
  double operator()(i64 a, i64 b) const { return table_[mod_reduce(a, c_) * c_ + mod_reduce(b, c_)]; }

 private:
  u64 c_;
  std::vector<double> table_;
};

/// S(u, v; c) for every u mod c at fixed v, via one FFT.
std::vector<double> kloosterman_row(i64 v, u64 c);

/// Baby sum S(h, n, m; c, d) = sum*_{x mod c} S(m, x; d) e((h xbar - n x)/c).
/// Throws std::invalid_argument when d does not divide c.
ExpSumValue baby_s(i64 h, i64 n, i64 m, u64 c, u64 d);

/// T(a, b, m; c) = (1/c) sum*_{x mod c} S(xbar + a, -b; c) e(-m x / c).
ExpSumValue baby_t(i64 a, i64 b, i64 m, u64 c);

/// T(a, b, m; c) for all m mod c at once (two FFTs).
std::vector<cplx> baby_t_row(i64 a, i64 b, u64 c);

/// Table-accelerated evaluators for identity sweeps.  They enumerate the same
/// defining sums as baby_s / baby_t but read inner Kloosterman sums from tables.
class BabySumEngine {
 public:
  /// S(h, n, m; d*l, d), O(c) given the tables for d.
  cplx s_sum(i64 h, i64 n, i64 m, u64 c, u64 d);
  /// T(a, b, m; c), O(c) given the Kloosterman table for c.
  cplx t_sum(i64 a, i64 b, i64 m, u64 c);
  /// S(a, b; c) from the table.
  double kloosterman(i64 a, i64 b, u64 c);

 private:
  const ModulusContext& context(u64 c);
  const KloostermanTable& table(u64 c);

  std::unordered_map<u64, std::unique_ptr<ModulusContext>> contexts_;
  std::unordered_map<u64, std::unique_ptr<KloostermanTable>> tables_;
};

// --- identities ---------------------------------------------------------------

/// Relative tolerance for identity checks: |lhs - rhs| <= tol * (1 + |lhs|).
inline constexpr double kIdentityTolerance = 1e-6;

/// Checks S(h,n,m; d l, d) = d S(h, -n dbar^2; l) T(n lbar, h lbar, m; d).
/// Throws std::invalid_argument unless gcd(d, l) = 1 and d l is squarefree.
SumReport verify_s_factorization(i64 h, i64 n, i64 m, u64 d, u64 l);

/// Checks T(a,b,m; c1 c2) = T(a, b c2bar^2, m c2bar; c1) T(a, b c1bar^2, m c1bar; c2).
SumReport verify_t_multiplicativity(i64 a, i64 b, i64 m, u64 c1, u64 c2);

struct IdentitySweep {
  std::string identity;
  u64 d = 1, l = 1;  // factor pair (d, l) or (c1, c2)
  u64 checked = 0;
  u64 failures = 0;
  double max_rel_error = 0.0;
};

/// Sweep one coprime factor pair: all triples in [0, d l)^3 when exhaustive,
/// otherwise `samples` triples drawn from rng.
IdentitySweep sweep_s_factorization(u64 d, u64 l, bool exhaustive, u64 samples, CounterRng& rng);
IdentitySweep sweep_t_multiplicativity(u64 c1, u64 c2, bool exhaustive, u64 samples,
                                       CounterRng& rng);

/// Every coprime ordered pair (d, l) with d l squarefree and 1 <= d l <= max_modulus.
std::vector<std::pair<u64, u64>> coprime_factor_pairs(u64 max_modulus);

// --- Fourier transform mod q -------------------------------------------------

/// fhat(y) = q^{-1/2} sum_x f(x) e(-y x / q), q = f.size().
std::vector<cplx> fourier_transform_modp(std::span<const cplx> f);

// --- correlation of T-sums -----------------------------------------------------

struct CorrelationReport {
  u64 p = 0;
  i64 a1 = 0, b1 = 0, a2 = 0, b2 = 0;
  bool diagonal = false;
  /// (1/p) sum_y T(a1,b1,y;p) conj(T(a2,b2,y;p))
  cplx rho{};
  /// |rho| sqrt(p) off the diagonal, rho itself on it.
  cplx normalized{};
};

/// Throws std::invalid_argument when p divides b1 b2 or p is not prime.
CorrelationReport correlation_t(i64 a1, i64 b1, i64 a2, i64 b2, u64 p);

struct CorrelationSweep {
  u64 primes = 0;
  u64 off_diagonal_checked = 0;
  u64 diagonal_checked = 0;
  double max_off_diagonal = 0.0;  // max |rho| sqrt(p)
  u64 argmax_p = 0;
  double min_diagonal = 0.0, max_diagonal = 0.0;
};

/// For every prime lo < p < hi with p = 2 mod 3: `tuples` random off-diagonal
/// tuples and their diagonal counterparts.
CorrelationSweep correlation_sweep(u64 lo, u64 hi, u64 tuples, std::uint64_t seed,
                                   unsigned workers = 1);

/// True when k -> k^3 permutes (Z/pZ)^*.
bool cube_map_is_bijective(u64 p);

// --- incomplete sums and exponent pairs ----------------------------------------

struct KloostermanTrace {
  u64 q;
};
/// n -> T(a1,b1,n;q) conj(T(a2,b2,n;q)).
struct TCorrelationTrace {
  i64 a1, b1, a2, b2;
  u64 q;
};
using TraceSpec = std::variant<KloostermanTrace, TCorrelationTrace>;

/// One period of the trace function, K(n) for n in [0, q).
std::vector<cplx> trace_values(const TraceSpec& spec);
u64 trace_modulus(const TraceSpec& spec);

/// sum_{lo <= n <= hi} K(n) W(n mod delta), delta = w.size().  Empty when hi < lo.
/// Throws when the trace modulus is not squarefree or ||W||_inf > 1.
ExpSumValue incomplete_sum(const TraceSpec& spec, i64 lo, i64 hi, std::span<const cplx> w);

struct ExponentPair {
  Rational kappa, lambda, nu, mu;

  /// 0 <= kappa <= 1/2 and kappa <= lambda <= 1.
  bool admissible() const;

  static ExponentPair trivial();       // (0, 1, 0, 0)
  static ExponentPair polya_vinogradov();  // (1/2, 1/2, 1/2, 1)
  static ExponentPair weyl_type();     // (11/30, 16/30, 1/6, 1)
  static ExponentPair third();         // (2/18, 13/18, 11/28, 0)
};

/// (q/|I|)^kappa |I|^lambda delta^nu ||What||^mu, without the q^eps factor.
/// Throws std::invalid_argument unless |I| < q delta.
double exponent_pair_bound(const ExponentPair& pair, double q, double interval_len, double delta,
                           double w_hat_inf);

/// Largest |sum over I of Kl(n, q)| / (sqrt(q) log q) over `intervals` random
/// subintervals of [1, q].
SumReport polya_vinogradov_sweep(u64 q, u64 intervals, CounterRng& rng);

/// Measured |incomplete sum| / exponent_pair_bound over random subintervals.
SumReport exponent_pair_measurement(const TraceSpec& spec, const ExponentPair& pair,
                                    std::span<const cplx> w, u64 intervals, CounterRng& rng);

}  // namespace shiftconv
