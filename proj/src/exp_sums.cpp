#include "shiftconv/exp_sums.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include "shiftconv/fft.hpp"
#include "shiftconv/parallel.hpp"

namespace shiftconv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Inverse modulo m, with the convention that everything is 0 modulo 1.
u64 inv_or_zero(i64 a, u64 m) { return m == 1 ? 0 : mod_inv(a, m); }

// (a * b) mod m for residues already reduced into [0, m).
inline u64 mulr(u64 a, u64 b, u64 m) {
  if (m < (u64{1} << 32)) return (a * b) % m;
  return mul_mod(a, b, m);
}

// S(u, v; c) by enumeration over the context's units.
cplx kloosterman_enum(u64 u, u64 v, const ModulusContext& ctx, u64* terms = nullptr) {
  const u64 c = ctx.modulus();
  CompensatedSum acc;
  for (u64 x : ctx.units()) {
    const u64 idx = (mulr(u, x, c) + mulr(v, ctx.inverse(x), c)) % c;
    acc.add(ctx.twiddle()[idx]);
  }
  if (terms) *terms = ctx.units().size();
  return acc.value();
}

double rel_error(cplx lhs, cplx rhs) { return std::abs(lhs - rhs) / (1.0 + std::abs(lhs)); }

}  // namespace

TwiddleTable::TwiddleTable(u64 c) : c_(c), table_(c) {
  if (c == 0) throw std::invalid_argument("TwiddleTable: modulus must be positive");
  for (u64 j = 0; j < c; ++j) {
    // Reduce the angle to [-pi, pi] to keep sin/cos arguments small.
    const double t = static_cast<double>(j) / static_cast<double>(c);
    const double angle = kTwoPi * (t > 0.5 ? t - 1.0 : t);
    table_[j] = {std::cos(angle), std::sin(angle)};
  }
}

ModulusContext::ModulusContext(u64 c) : c_(c), twiddle_(c), inverse_(c, 0) {
  if (c == 1) {
    units_.push_back(0);
    return;
  }
  for (u64 x = 1; x < c; ++x) {
    if (gcd(x, c) != 1) continue;
    units_.push_back(x);
    inverse_[x] = mod_inv(static_cast<i64>(x), c);
  }
}

ExpSumValue kloosterman(i64 m, i64 n, u64 c) {
  if (c == 0) throw std::invalid_argument("kloosterman: modulus must be positive");
  const ModulusContext ctx(c);
  ExpSumValue out;
  out.modulus = c;
  out.value = kloosterman_enum(mod_reduce(m, c), mod_reduce(n, c), ctx, &out.term_count);
  return out;
}

double kloosterman_normalized(i64 n, u64 q) {
  if (q < 3) throw std::invalid_argument("kloosterman_normalized: modulus must be >= 3");
  if (!is_squarefree(q)) {
    throw std::invalid_argument("kloosterman_normalized: " + std::to_string(q) + " is not squarefree");
  }
  return kloosterman(n, 1, q).value.real() / std::sqrt(static_cast<double>(q));
}

KloostermanTable::KloostermanTable(u64 c) : KloostermanTable(ModulusContext(c)) {}

KloostermanTable::KloostermanTable(const ModulusContext& ctx)
    : c_(ctx.modulus()), table_(ctx.modulus() * ctx.modulus(), 0.0) {
  std::vector<double> cosines(c_);
  for (u64 j = 0; j < c_; ++j) cosines[j] = ctx.twiddle()[j].real();
  for (u64 a = 0; a < c_; ++a) {
    double* row = &table_[a * c_];
    for (u64 x : ctx.units()) {
      const u64 step = ctx.inverse(x);
      u64 idx = (a * x) % c_;
      for (u64 b = 0; b < c_; ++b) {
        row[b] += cosines[idx];
        idx += step;
        if (idx >= c_) idx -= c_;
      }
    }
  }
}

std::vector<double> kloosterman_row(i64 v, u64 c) {
  if (c == 0) throw std::invalid_argument("kloosterman_row: modulus must be positive");
  if (c == 1) return {1.0};
  const ModulusContext ctx(c);
  const u64 vr = mod_reduce(v, c);
  std::vector<cplx> g(c, cplx{});
  for (u64 x : ctx.units()) g[x] = ctx.twiddle()[mulr(vr, ctx.inverse(x), c)];
  const auto spectrum = dft(g, FftSign::Backward);
  std::vector<double> out(c);
  for (u64 u = 0; u < c; ++u) out[u] = spectrum[u].real();
  return out;
}

ExpSumValue baby_s(i64 h, i64 n, i64 m, u64 c, u64 d) {
  if (c == 0 || d == 0 || c % d != 0) {
    throw std::invalid_argument("baby_s: d = " + std::to_string(d) + " does not divide c = " +
                                std::to_string(c));
  }
  const ModulusContext outer(c);
  const ModulusContext inner_ctx(d);
  const u64 mr = mod_reduce(m, d);
  std::vector<cplx> inner(d);
  for (u64 y = 0; y < d; ++y) inner[y] = kloosterman_enum(mr, y, inner_ctx);

  const u64 hr = mod_reduce(h, c);
  const u64 nr = mod_reduce(n, c);
  CompensatedSum acc;
  for (u64 x : outer.units()) {
    const u64 idx = (mulr(hr, outer.inverse(x), c) + c - mulr(nr, x, c)) % c;
    acc.add(inner[x % d] * outer.twiddle()[idx]);
  }
  return {acc.value(), c, outer.units().size() * inner_ctx.units().size()};
}

ExpSumValue baby_t(i64 a, i64 b, i64 m, u64 c) {
  if (c == 0) throw std::invalid_argument("baby_t: modulus must be positive");
  const ModulusContext ctx(c);
  const u64 ar = mod_reduce(a, c);
  const u64 nb = (c - mod_reduce(b, c)) % c;
  const u64 mr = mod_reduce(m, c);
  CompensatedSum acc;
  for (u64 x : ctx.units()) {
    const u64 first = (ctx.inverse(x) + ar) % c;
    const cplx s = kloosterman_enum(first, nb, ctx);
    acc.add(s * ctx.twiddle()[(c - mulr(mr, x, c)) % c]);
  }
  const u64 phi = ctx.units().size();
  return {acc.value() / static_cast<double>(c), c, phi * phi};
}

std::vector<cplx> baby_t_row(i64 a, i64 b, u64 c) {
  if (c == 0) throw std::invalid_argument("baby_t_row: modulus must be positive");
  if (c == 1) return {cplx{1.0, 0.0}};
  const ModulusContext ctx(c);
  const auto s_row = kloosterman_row(-static_cast<i64>(mod_reduce(b, c)), c);
  const u64 ar = mod_reduce(a, c);
  std::vector<cplx> g(c, cplx{});
  for (u64 x : ctx.units()) g[x] = s_row[(ctx.inverse(x) + ar) % c];
  auto t = dft(g, FftSign::Forward);
  for (auto& z : t) z /= static_cast<double>(c);
  return t;
}

const ModulusContext& BabySumEngine::context(u64 c) {
  auto& slot = contexts_[c];
  if (!slot) slot = std::make_unique<ModulusContext>(c);
  return *slot;
}

const KloostermanTable& BabySumEngine::table(u64 c) {
  auto& slot = tables_[c];
  if (!slot) slot = std::make_unique<KloostermanTable>(context(c));
  return *slot;
}

double BabySumEngine::kloosterman(i64 a, i64 b, u64 c) { return table(c)(a, b); }

cplx BabySumEngine::s_sum(i64 h, i64 n, i64 m, u64 c, u64 d) {
  const auto& ctx = context(c);
  const auto& inner = table(d);
  const u64 hr = mod_reduce(h, c);
  const u64 nr = mod_reduce(n, c);
  cplx acc{};
  for (u64 x : ctx.units()) {
    const u64 idx = (mulr(hr, ctx.inverse(x), c) + c - mulr(nr, x, c)) % c;
    acc += inner(m, static_cast<i64>(x % d)) * ctx.twiddle()[idx];
  }
  return acc;
}

cplx BabySumEngine::t_sum(i64 a, i64 b, i64 m, u64 c) {
  const auto& ctx = context(c);
  const auto& s = table(c);
  const u64 ar = mod_reduce(a, c);
  const i64 nb = -static_cast<i64>(mod_reduce(b, c));
  const u64 mr = mod_reduce(m, c);
  cplx acc{};
  for (u64 x : ctx.units()) {
    acc += s(static_cast<i64>((ctx.inverse(x) + ar) % c), nb) *
           ctx.twiddle()[(c - mulr(mr, x, c)) % c];
  }
  return acc / static_cast<double>(c);
}

namespace {

void require_coprime_squarefree(u64 d, u64 l, const char* what) {
  if (d == 0 || l == 0 || gcd(d, l) != 1) {
    throw std::invalid_argument(std::string(what) + ": factors " + std::to_string(d) + " and " +
                                std::to_string(l) + " are not coprime");
  }
  if (!is_squarefree(d * l)) {
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(d * l) +
                                " is not squarefree");
  }
}

SumReport identity_report(const char* name, cplx lhs, cplx rhs, nlohmann::json params) {
  SumReport r;
  r.name = name;
  r.value = lhs;
  r.bound = std::abs(rhs);
  const double err = rel_error(lhs, rhs);
  r.ratio = err;
  r.pass = err <= kIdentityTolerance;
  params["lhs_re"] = lhs.real();
  params["lhs_im"] = lhs.imag();
  params["rhs_re"] = rhs.real();
  params["rhs_im"] = rhs.imag();
  params["abs_diff"] = std::abs(lhs - rhs);
  r.params = std::move(params);
  return r;
}

// Arguments of the right-hand side of the S-factorization for modulus d*l.
struct SFactorArgs {
  i64 kl_second;  // -n dbar^2 mod l
  i64 t_a, t_b;   // n lbar, h lbar mod d
};

SFactorArgs s_factor_args(i64 h, i64 n, u64 d, u64 l) {
  const u64 dbar = inv_or_zero(static_cast<i64>(d % l), l);
  const u64 lbar = inv_or_zero(static_cast<i64>(l % d), d);
  SFactorArgs out{};
  out.kl_second = l == 1 ? 0
                         : -static_cast<i64>(mul_mod(mod_reduce(n, l), mul_mod(dbar, dbar, l), l));
  out.t_a = d == 1 ? 0 : static_cast<i64>(mul_mod(mod_reduce(n, d), lbar, d));
  out.t_b = d == 1 ? 0 : static_cast<i64>(mul_mod(mod_reduce(h, d), lbar, d));
  return out;
}

// Arguments of T(a, b cbar^2, m cbar; target) where cbar inverts `other` mod target.
std::pair<i64, i64> t_factor_args(i64 b, i64 m, u64 other, u64 target) {
  if (target == 1) return {0, 0};
  const u64 inv = mod_inv(static_cast<i64>(other % target), target);
  const i64 bb = static_cast<i64>(mul_mod(mod_reduce(b, target), mul_mod(inv, inv, target), target));
  const i64 mm = static_cast<i64>(mul_mod(mod_reduce(m, target), inv, target));
  return {bb, mm};
}

}  // namespace

SumReport verify_s_factorization(i64 h, i64 n, i64 m, u64 d, u64 l) {
  require_coprime_squarefree(d, l, "verify_s_factorization");
  const u64 c = d * l;
  const cplx lhs = baby_s(h, n, m, c, d).value;
  const auto args = s_factor_args(h, n, d, l);
  const cplx rhs = static_cast<double>(d) * kloosterman(h, args.kl_second, l).value *
                   baby_t(args.t_a, args.t_b, m, d).value;
  return identity_report("s_factorization", lhs, rhs,
                         {{"h", h}, {"n", n}, {"m", m}, {"d", d}, {"l", l}});
}

SumReport verify_t_multiplicativity(i64 a, i64 b, i64 m, u64 c1, u64 c2) {
  require_coprime_squarefree(c1, c2, "verify_t_multiplicativity");
  const cplx lhs = baby_t(a, b, m, c1 * c2).value;
  const auto [b1, m1] = t_factor_args(b, m, c2, c1);
  const auto [b2, m2] = t_factor_args(b, m, c1, c2);
  const cplx rhs = baby_t(a, b1, m1, c1).value * baby_t(a, b2, m2, c2).value;
  return identity_report("t_multiplicativity", lhs, rhs,
                         {{"a", a}, {"b", b}, {"m", m}, {"c1", c1}, {"c2", c2}});
}

IdentitySweep sweep_s_factorization(u64 d, u64 l, bool exhaustive, u64 samples, CounterRng& rng) {
  require_coprime_squarefree(d, l, "sweep_s_factorization");
  const u64 c = d * l;
  IdentitySweep out{"s_factorization", d, l};
  auto record = [&](cplx lhs, cplx rhs) {
    const double err = rel_error(lhs, rhs);
    ++out.checked;
    if (!(err <= kIdentityTolerance)) ++out.failures;
    out.max_rel_error = std::max(out.max_rel_error, err);
  };
  if (exhaustive) {
    BabySumEngine engine;
    for (u64 h = 0; h < c; ++h) {
      for (u64 n = 0; n < c; ++n) {
        const auto args = s_factor_args(static_cast<i64>(h), static_cast<i64>(n), d, l);
        const double kl = engine.kloosterman(static_cast<i64>(h), args.kl_second, l);
        for (u64 m = 0; m < c; ++m) {
          const cplx lhs = engine.s_sum(static_cast<i64>(h), static_cast<i64>(n), static_cast<i64>(m), c, d);
          const cplx rhs = static_cast<double>(d) * kl *
                           engine.t_sum(args.t_a, args.t_b, static_cast<i64>(m), d);
          record(lhs, rhs);
        }
      }
    }
  } else {
    for (u64 i = 0; i < samples; ++i) {
      const i64 h = rng.uniform(0, static_cast<i64>(c) - 1);
      const i64 n = rng.uniform(0, static_cast<i64>(c) - 1);
      const i64 m = rng.uniform(0, static_cast<i64>(c) - 1);
      const auto rep = verify_s_factorization(h, n, m, d, l);
      record(rep.value, {rep.params["rhs_re"].get<double>(), rep.params["rhs_im"].get<double>()});
    }
  }
  return out;
}

IdentitySweep sweep_t_multiplicativity(u64 c1, u64 c2, bool exhaustive, u64 samples,
                                       CounterRng& rng) {
  require_coprime_squarefree(c1, c2, "sweep_t_multiplicativity");
  const u64 c = c1 * c2;
  IdentitySweep out{"t_multiplicativity", c1, c2};
  auto record = [&](cplx lhs, cplx rhs) {
    const double err = rel_error(lhs, rhs);
    ++out.checked;
    if (!(err <= kIdentityTolerance)) ++out.failures;
    out.max_rel_error = std::max(out.max_rel_error, err);
  };
  if (exhaustive) {
    BabySumEngine engine;
    for (u64 a = 0; a < c; ++a) {
      for (u64 b = 0; b < c; ++b) {
        for (u64 m = 0; m < c; ++m) {
          const auto [b1, m1] = t_factor_args(static_cast<i64>(b), static_cast<i64>(m), c2, c1);
          const auto [b2, m2] = t_factor_args(static_cast<i64>(b), static_cast<i64>(m), c1, c2);
          const cplx lhs = engine.t_sum(static_cast<i64>(a), static_cast<i64>(b), static_cast<i64>(m), c);
          const cplx rhs = engine.t_sum(static_cast<i64>(a), b1, m1, c1) *
                           engine.t_sum(static_cast<i64>(a), b2, m2, c2);
          record(lhs, rhs);
        }
      }
    }
  } else {
    for (u64 i = 0; i < samples; ++i) {
      const i64 a = rng.uniform(0, static_cast<i64>(c) - 1);
      const i64 b = rng.uniform(0, static_cast<i64>(c) - 1);
      const i64 m = rng.uniform(0, static_cast<i64>(c) - 1);
      const auto rep = verify_t_multiplicativity(a, b, m, c1, c2);
      record(rep.value, {rep.params["rhs_re"].get<double>(), rep.params["rhs_im"].get<double>()});
    }
  }
  return out;
}

std::vector<std::pair<u64, u64>> coprime_factor_pairs(u64 max_modulus) {
  std::vector<std::pair<u64, u64>> pairs;
  for (u64 c = 1; c <= max_modulus; ++c) {
    if (!is_squarefree(c)) continue;
    for (u64 d = 1; d <= c; ++d) {
      if (c % d == 0) pairs.emplace_back(d, c / d);
    }
  }
  return pairs;
}

std::vector<cplx> fourier_transform_modp(std::span<const cplx> f) {
  const u64 q = f.size();
  if (q == 0) throw std::invalid_argument("fourier_transform_modp: empty table");
  const TwiddleTable tw(q);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q));
  std::vector<cplx> out(q);
  for (u64 y = 0; y < q; ++y) {
    CompensatedSum acc;
    u64 idx = 0;  // y * x mod q
    for (u64 x = 0; x < q; ++x) {
      acc.add(f[x] * tw[(q - idx) % q]);
      idx += y;
      if (idx >= q) idx -= q;
    }
    out[y] = acc.value() * scale;
  }
  return out;
}

CorrelationReport correlation_t(i64 a1, i64 b1, i64 a2, i64 b2, u64 p) {
  if (!is_prime(p)) throw std::invalid_argument("correlation_t: modulus must be prime");
  if (mod_reduce(b1, p) == 0 || mod_reduce(b2, p) == 0) {
    throw std::invalid_argument("correlation_t: p divides b1 b2");
  }
  const auto t1 = baby_t_row(a1, b1, p);
  const auto t2 = baby_t_row(a2, b2, p);
  CompensatedSum acc;
  for (u64 y = 0; y < p; ++y) acc.add(t1[y] * std::conj(t2[y]));
  CorrelationReport r{p, a1, b1, a2, b2};
  r.diagonal = mod_reduce(a1, p) == mod_reduce(a2, p) && mod_reduce(b1, p) == mod_reduce(b2, p);
  r.rho = acc.value() / static_cast<double>(p);
  r.normalized = r.diagonal ? r.rho : cplx{std::abs(r.rho) * std::sqrt(static_cast<double>(p)), 0.0};
  return r;
}

CorrelationSweep correlation_sweep(u64 lo, u64 hi, u64 tuples, std::uint64_t seed,
                                   unsigned workers) {
  std::vector<u64> primes;
  for (u64 p : primes_up_to(hi > 0 ? hi - 1 : 0)) {
    if (p > lo && p % 3 == 2) primes.push_back(p);
  }
  struct PerPrime {
    double max_off = 0.0, min_diag = 1e300, max_diag = 0.0;
    u64 off = 0, diag = 0;
  };
  const auto per_prime = parallel_map(primes.size(), workers, [&](std::size_t i) {
    const u64 p = primes[i];
    CounterRng rng(seed, p);
    PerPrime out;
    const i64 ip = static_cast<i64>(p);
    for (u64 t = 0; t < tuples; ++t) {
      i64 a1, b1, a2, b2;
      do {
        a1 = rng.uniform(0, ip - 1);
        b1 = rng.uniform(1, ip - 1);
        a2 = rng.uniform(0, ip - 1);
        b2 = rng.uniform(1, ip - 1);
      } while (a1 == a2 && b1 == b2);
      const auto off = correlation_t(a1, b1, a2, b2, p);
      out.max_off = std::max(out.max_off, off.normalized.real());
      ++out.off;
      const auto diag = correlation_t(a1, b1, a1, b1, p);
      out.min_diag = std::min(out.min_diag, diag.rho.real());
      out.max_diag = std::max(out.max_diag, diag.rho.real());
      ++out.diag;
    }
    return out;
  });
  CorrelationSweep sweep;
  sweep.primes = primes.size();
  sweep.min_diagonal = primes.empty() ? 0.0 : 1e300;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const auto& r = per_prime[i];
    if (r.max_off > sweep.max_off_diagonal) {
      sweep.max_off_diagonal = r.max_off;
      sweep.argmax_p = primes[i];
    }
    sweep.off_diagonal_checked += r.off;
    sweep.diagonal_checked += r.diag;
    sweep.min_diagonal = std::min(sweep.min_diagonal, r.min_diag);
    sweep.max_diagonal = std::max(sweep.max_diagonal, r.max_diag);
  }
  return sweep;
}

bool cube_map_is_bijective(u64 p) {
  std::vector<bool> seen(p, false);
  for (u64 k = 1; k < p; ++k) {
    const u64 c = mul_mod(mul_mod(k, k, p), k, p);
    if (seen[c]) return false;
    seen[c] = true;
  }
  return true;
}

u64 trace_modulus(const TraceSpec& spec) {
  return std::visit([](const auto& s) { return s.q; }, spec);
}

std::vector<cplx> trace_values(const TraceSpec& spec) {
  const u64 q = trace_modulus(spec);
  if (q == 0 || !is_squarefree(q)) {
    throw std::invalid_argument("trace function modulus " + std::to_string(q) + " is not squarefree");
  }
  if (const auto* kl = std::get_if<KloostermanTrace>(&spec)) {
    const auto row = kloosterman_row(1, kl->q);
    const double scale = 1.0 / std::sqrt(static_cast<double>(q));
    std::vector<cplx> out(q);
    for (u64 n = 0; n < q; ++n) out[n] = row[n] * scale;
    return out;
  }
  const auto& tc = std::get<TCorrelationTrace>(spec);
  const auto t1 = baby_t_row(tc.a1, tc.b1, q);
  const auto t2 = baby_t_row(tc.a2, tc.b2, q);
  std::vector<cplx> out(q);
  for (u64 n = 0; n < q; ++n) out[n] = t1[n] * std::conj(t2[n]);
  return out;
}

ExpSumValue incomplete_sum(const TraceSpec& spec, i64 lo, i64 hi, std::span<const cplx> w) {
  const auto k = trace_values(spec);
  const u64 q = k.size();
  if (w.empty()) throw std::invalid_argument("incomplete_sum: W table is empty");
  for (const auto& z : w) {
    if (std::abs(z) > 1.0 + 1e-12) throw std::invalid_argument("incomplete_sum: ||W||_inf > 1");
  }
  ExpSumValue out;
  out.modulus = q;
  if (hi < lo) return out;
  double kmax = 0.0;
  for (const auto& z : k) kmax = std::max(kmax, std::abs(z));
  const u64 delta = w.size();
  CompensatedSum acc;
  for (i64 n = lo; n <= hi; ++n) acc.add(k[mod_reduce(n, q)] * w[mod_reduce(n, delta)]);
  out.value = acc.value();
  out.term_count = static_cast<u64>(hi - lo + 1) * static_cast<u64>(std::ceil(std::max(kmax, 1.0)));
  return out;
}

bool ExponentPair::admissible() const {
  return kappa >= 0 && kappa <= Rational(1, 2) && kappa <= lambda && lambda <= 1;
}

ExponentPair ExponentPair::trivial() { return {0, 1, 0, 0}; }
ExponentPair ExponentPair::polya_vinogradov() {
  return {Rational(1, 2), Rational(1, 2), Rational(1, 2), 1};
}
ExponentPair ExponentPair::weyl_type() {
  return {Rational(11, 30), Rational(16, 30), Rational(1, 6), 1};
}
ExponentPair ExponentPair::third() {
  return {Rational(2, 18), Rational(13, 18), Rational(11, 28), 0};
}

double exponent_pair_bound(const ExponentPair& pair, double q, double interval_len, double delta,
                           double w_hat_inf) {
  if (!(q > 0 && interval_len > 0 && delta > 0 && w_hat_inf >= 0)) {
    throw std::invalid_argument("exponent_pair_bound: inputs must be positive");
  }
  if (interval_len >= q * delta) {
    throw std::invalid_argument("exponent_pair_bound: requires |I| < q delta");
  }
  return std::pow(q / interval_len, to_double(pair.kappa)) *
         std::pow(interval_len, to_double(pair.lambda)) * std::pow(delta, to_double(pair.nu)) *
         std::pow(w_hat_inf, to_double(pair.mu));
}

SumReport polya_vinogradov_sweep(u64 q, u64 intervals, CounterRng& rng) {
  const auto k = trace_values(KloostermanTrace{q});
  std::vector<cplx> prefix(q + 1, cplx{});
  for (u64 n = 1; n <= q; ++n) prefix[n] = prefix[n - 1] + k[n % q];
  const double scale = std::sqrt(static_cast<double>(q)) * std::log(static_cast<double>(q));
  double worst = 0.0;
  i64 worst_lo = 1, worst_hi = 0;
  for (u64 i = 0; i < intervals; ++i) {
    i64 lo = rng.uniform(1, static_cast<i64>(q));
    i64 hi = rng.uniform(1, static_cast<i64>(q));
    if (hi < lo) std::swap(lo, hi);
    const double v = std::abs(prefix[hi] - prefix[lo - 1]);
    if (v > worst) {
      worst = v;
      worst_lo = lo;
      worst_hi = hi;
    }
  }
  SumReport r;
  r.name = "polya_vinogradov";
  r.value = worst;
  r.bound = scale;
  r.ratio = worst / scale;
  r.params = {{"q", q}, {"intervals", intervals}, {"worst_lo", worst_lo}, {"worst_hi", worst_hi}};
  return r;
}

SumReport exponent_pair_measurement(const TraceSpec& spec, const ExponentPair& pair,
                                    std::span<const cplx> w, u64 intervals, CounterRng& rng) {
  const u64 q = trace_modulus(spec);
  const u64 delta = w.size();
  const auto what = fourier_transform_modp(w);
  double what_inf = 0.0;
  for (const auto& z : what) what_inf = std::max(what_inf, std::abs(z));
  const i64 period = static_cast<i64>(q * delta);
  double worst = 0.0;
  nlohmann::json worst_params;
  for (u64 i = 0; i < intervals; ++i) {
    const i64 len = rng.uniform(1, std::max<i64>(1, period - 1));
    const i64 lo = rng.uniform(0, period - 1);
    const auto s = incomplete_sum(spec, lo, lo + len - 1, w);
    const double bound = exponent_pair_bound(pair, static_cast<double>(q), static_cast<double>(len),
                                             static_cast<double>(delta), what_inf);
    const double ratio = std::abs(s.value) / bound;
    if (ratio > worst) {
      worst = ratio;
      worst_params = {{"lo", lo}, {"len", len}, {"abs", std::abs(s.value)}, {"bound", bound}};
    }
  }
  SumReport r;
  r.name = "exponent_pair";
  r.value = worst;
  r.ratio = worst;
  r.bound = 1.0;
  r.params = {{"q", q},
              {"delta", delta},
              {"kappa", to_string(pair.kappa)},
              {"lambda", to_string(pair.lambda)},
              {"nu", to_string(pair.nu)},
              {"mu", to_string(pair.mu)},
              {"w_hat_inf", what_inf},
              {"worst", worst_params}};
  return r;
}

}  // namespace shiftconv
