#include "shiftconv/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "shiftconv/circle.hpp"
#include "shiftconv/exp_sums.hpp"
#include "shiftconv/optimizer.hpp"
#include "shiftconv/parallel.hpp"
#include "shiftconv/random.hpp"
#include "shiftconv/spectral.hpp"
#include "shiftconv/voronoi.hpp"

namespace shiftconv {

namespace {

// Tolerances and limits of the acceptance battery.
constexpr double kIdentityRelTol = 1e-6;
constexpr double kFourierTol = 1e-9;
constexpr double kCorrelationMax = 10.0;
constexpr double kDiagonalLo = 0.3, kDiagonalHi = 3.0;
constexpr double kKernelMassTol = 1e-12;
constexpr double kVarianceRatioMax = 100.0;
constexpr double kParsevalTol = 1e-6;
constexpr double kFftDirectTol = 1e-9;
constexpr double kResonanceMax = 20.0;
constexpr double kResonanceGrowthMax = 3.0;
constexpr double kVoronoiTol = 1e-4;
constexpr double kDecayExponentMin = 3.0;
constexpr double kMeanSquareGrowthMax = 10.0;
constexpr double kSmoothedRatioMax = 0.1;

using Clock = std::chrono::steady_clock;

}  // namespace

CriterionResult check_identities(u64 random_max, u64 exhaustive_max, u64 samples, std::uint64_t seed,
                                 unsigned workers) {
  CriterionResult r{1, "S-factorization and T multiplicativity", false, 0, 120, {}, {}};

  const auto pairs = coprime_factor_pairs(random_max);
  struct Outcome {
    u64 checked = 0, failures = 0;
    double worst = 0;
  };
  auto run = [&](bool t_sums) {
    const auto results = parallel_map(pairs.size(), workers, [&](std::size_t i) {
      const auto [d, l] = pairs[i];
      const bool exhaustive = d * l <= exhaustive_max;
      CounterRng rng(seed, (t_sums ? 1000003 : 0) + d * 1000 + l);
      return t_sums ? sweep_t_multiplicativity(d, l, exhaustive, samples, rng)
                    : sweep_s_factorization(d, l, exhaustive, samples, rng);
    });
    Outcome o;
    for (const auto& s : results) {
      o.checked += s.checked;
      o.failures += s.failures;
      o.worst = std::max(o.worst, s.max_rel_error);
    }
    return o;
  };
  const Outcome s = run(false);
  const Outcome t = run(true);
  r.pass = s.failures == 0 && t.failures == 0 && s.worst <= kIdentityRelTol && t.worst <= kIdentityRelTol;
  r.summary = fmt::format("S: {} checks, max rel err {:.2e}; T: {} checks, max rel err {:.2e}", s.checked, s.worst,
                          t.checked, t.worst);
  r.data = {{"pairs", pairs.size()}, {"exhaustive_max", exhaustive_max}, {"random_max", random_max},
            {"s_checked", s.checked}, {"s_failures", s.failures}, {"s_max_rel_error", s.worst},
            {"t_checked", t.checked}, {"t_failures", t.failures}, {"t_max_rel_error", t.worst}};
  return r;
}

CriterionResult check_weil(u64 p_max, u64 q_count, std::uint64_t seed, unsigned workers) {
  CriterionResult r{2, "Weil and Kl bounds", false, 0, 0, {}, {}};
  const auto primes = primes_up_to(p_max - 1);

  struct PrimeOutcome {
    u64 checked = 0, violations = 0;
    double worst = 0;  // max |S| / (2 sqrt p)
  };
  const auto per_prime = parallel_map(primes.size(), workers, [&](std::size_t i) {
    const u64 p = primes[i];
    // S(m, n; p) = S(1, m n; p) = S(m n, 1; p) when p does not divide m n.
    const auto row = kloosterman_row(1, p);
    const double bound = 2.0 * std::sqrt(static_cast<double>(p));
    PrimeOutcome o;
    for (u64 m = 1; m < p; ++m) {
      for (u64 n = 1; n < p; ++n) {
        const double s = std::abs(row[mul_mod(m, n, p)]);
        ++o.checked;
        if (s > bound) ++o.violations;
        o.worst = std::max(o.worst, s / bound);
      }
    }
    return o;
  });
  PrimeOutcome weil;
  for (const auto& o : per_prime) {
    weil.checked += o.checked;
    weil.violations += o.violations;
    weil.worst = std::max(weil.worst, o.worst);
  }

  // Direct enumeration for small primes, independent of the row reduction.
  u64 direct_violations = 0;
  for (u64 p : primes) {
    if (p > 60) break;
    const double bound = 2.0 * std::sqrt(static_cast<double>(p));
    for (u64 m = 1; m < p; ++m) {
      for (u64 n = 1; n < p; ++n) {
        if (std::abs(kloosterman(static_cast<i64>(m), static_cast<i64>(n), p).value) > bound) ++direct_violations;
      }
    }
  }

  CounterRng rng(seed, 2);
  std::vector<u64> moduli;
  while (moduli.size() < q_count) {
    const auto q = static_cast<u64>(rng.uniform(3, 10000));
    if (is_squarefree(q)) moduli.push_back(q);
  }
  const auto per_q = parallel_map(moduli.size(), workers, [&](std::size_t i) {
    const u64 q = moduli[i];
    const auto row = kloosterman_row(1, q);  // S(n, 1; q) for every n
    const double bound = static_cast<double>(divisor_count(q));
    PrimeOutcome o;
    for (double s : row) {
      const double kl = std::abs(s) / std::sqrt(static_cast<double>(q));
      ++o.checked;
      if (kl > bound * (1 + 1e-12)) ++o.violations;
      o.worst = std::max(o.worst, kl / bound);
    }
    return o;
  });
  PrimeOutcome kl;
  for (const auto& o : per_q) {
    kl.checked += o.checked;
    kl.violations += o.violations;
    kl.worst = std::max(kl.worst, o.worst);
  }

  r.pass = weil.violations == 0 && direct_violations == 0 && kl.violations == 0;
  r.summary = fmt::format("{} (m,n,p) with max |S|/2sqrt(p) = {:.4f}; {} Kl values on {} moduli, max |Kl|/tau(q) = {:.4f}",
                          weil.checked, weil.worst, kl.checked, moduli.size(), kl.worst);
  r.data = {{"p_max", p_max}, {"weil_checked", weil.checked}, {"weil_violations", weil.violations},
            {"weil_max_ratio", weil.worst}, {"direct_violations", direct_violations},
            {"kl_moduli", moduli.size()}, {"kl_checked", kl.checked}, {"kl_violations", kl.violations},
            {"kl_max_ratio", kl.worst}};
  return r;
}

CriterionResult check_fourier(u64 p_max, u64 functions, std::uint64_t seed) {
  CriterionResult r{3, "Fourier transform mod p", false, 0, 0, {}, {}};
  double worst_involution = 0, worst_plancherel = 0;
  u64 cases = 0;
  for (u64 p : primes_up_to(p_max)) {
    CounterRng rng(seed, 3000 + p);
    for (u64 k = 0; k < functions; ++k) {
      std::vector<cplx> f(p);
      for (auto& v : f) v = {2 * rng.uniform01() - 1, 2 * rng.uniform01() - 1};
      const auto fh = fourier_transform_modp(f);
      const auto fhh = fourier_transform_modp(fh);
      double norm = 0, norm_hat = 0, diff = 0;
      for (u64 x = 0; x < p; ++x) {
        norm += std::norm(f[x]);
        norm_hat += std::norm(fh[x]);
        diff = std::max(diff, std::abs(fhh[x] - f[(p - x) % p]));
      }
      worst_involution = std::max(worst_involution, diff);
      worst_plancherel = std::max(worst_plancherel, std::abs(norm_hat - norm) / norm);
      ++cases;
    }
  }
  r.pass = worst_involution <= kFourierTol && worst_plancherel <= kFourierTol;
  r.summary = fmt::format("{} functions, max |fhathat(x) - f(-x)| = {:.2e}, max Plancherel rel err = {:.2e}", cases,
                          worst_involution, worst_plancherel);
  r.data = {{"functions", cases}, {"involution_error", worst_involution}, {"plancherel_error", worst_plancherel}};
  return r;
}

CriterionResult check_correlation(u64 lo, u64 hi, u64 tuples, std::uint64_t seed, unsigned workers) {
  CriterionResult r{4, "T-sum correlation dichotomy", false, 0, 300, {}, {}};
  const auto sweep = correlation_sweep(lo, hi, tuples, seed, workers);
  r.pass = sweep.primes > 0 && sweep.max_off_diagonal <= kCorrelationMax && sweep.min_diagonal >= kDiagonalLo &&
           sweep.max_diagonal <= kDiagonalHi;
  r.summary = fmt::format("{} primes, max |rho| sqrt(p) = {:.3f} (p = {}), diagonal rho in [{:.3f}, {:.3f}]",
                          sweep.primes, sweep.max_off_diagonal, sweep.argmax_p, sweep.min_diagonal, sweep.max_diagonal);
  r.data = {{"primes", sweep.primes}, {"off_diagonal", sweep.off_diagonal_checked},
            {"diagonal", sweep.diagonal_checked}, {"max_off_diagonal", sweep.max_off_diagonal},
            {"argmax_p", sweep.argmax_p}, {"min_diagonal", sweep.min_diagonal},
            {"max_diagonal", sweep.max_diagonal}};
  return r;
}

namespace {

CriterionResult identities(AcceptanceContext& ctx) {
  const bool quick = ctx.options().quick;
  return check_identities(quick ? 100 : 300, quick ? 30 : 60, 100, ctx.options().seed, ctx.options().workers);
}

CriterionResult weil(AcceptanceContext& ctx) {
  const bool quick = ctx.options().quick;
  return check_weil(quick ? 300 : 1000, quick ? 50 : 200, ctx.options().seed, ctx.options().workers);
}

CriterionResult fourier(AcceptanceContext& ctx) { return check_fourier(97, 10, ctx.options().seed); }

CriterionResult correlation(AcceptanceContext& ctx) {
  const bool quick = ctx.options().quick;
  return check_correlation(50, quick ? 200 : 500, quick ? 5 : 20, ctx.options().seed, ctx.options().workers);
}

CriterionResult jutila(AcceptanceContext& ctx) {
  CriterionResult r{5, "kernel mass and variance", false, 0, 0, {}, {}};
  const bool quick = ctx.options().quick;
  double worst_mass = 0;
  u64 configs = 0;
  nlohmann::json masses = nlohmann::json::array();
  for (double q : {20.0, 50.0, 100.0, 200.0, quick ? 300.0 : 1000.0}) {
    for (auto mode : {ModuliMode::TwoModThree, ModuliMode::AllSquarefree}) {
      const auto ms = build_moduli_set(q, 1.0, mode);
      if (ms.empty()) continue;
      const double err = std::abs(eval_I(ms).integral() - 1.0);
      worst_mass = std::max(worst_mass, err);
      masses.push_back({{"Q", q}, {"mode", to_string(mode)}, {"error", err}});
      ++configs;
    }
  }
  bool ratios_ok = true;
  nlohmann::json ratios = nlohmann::json::array();
  std::string text;
  for (double q : {200.0, quick ? 300.0 : 1000.0}) {
    for (auto mode : {ModuliMode::TwoModThree, ModuliMode::AllSquarefree}) {
      const auto rep = variance(build_moduli_set(q, 1.0, mode));
      if (mode == ModuliMode::AllSquarefree && rep.ratio > kVarianceRatioMax) ratios_ok = false;
      ratios.push_back({{"Q", q}, {"mode", to_string(mode)}, {"ratio", rep.ratio}, {"integral", rep.value.real()}});
      text += fmt::format(" {}@{}={:.3g}", to_string(mode), q, rep.ratio);
    }
  }
  r.pass = configs >= 10 && worst_mass <= kKernelMassTol && ratios_ok;
  r.summary = fmt::format("{} configurations, max |int I - 1| = {:.1e}; variance ratios{}", configs, worst_mass, text);
  r.data = {{"mass", masses}, {"variance", ratios}};
  return r;
}

CriterionResult parseval(AcceptanceContext& ctx) {
  CriterionResult r{6, "Parseval and FFT agreement", false, 0, 180, {}, {}};
  const bool quick = ctx.options().quick;
  const std::vector<double> xs = quick ? std::vector<double>{1024} : std::vector<double>{4096, 8192};
  const double top = xs.back();
  const auto& gl2 = ctx.gl2(static_cast<u64>(3 * top) + 2);
  const auto& gl3 = ctx.sym2(static_cast<u64>(2 * top) + 2);
  const ConvolutionInputs in{gl3, gl2};
  double worst_parseval = 0, worst_fft = 0;
  nlohmann::json rows = nlohmann::json::array();
  for (double x : xs) {
    const auto spectrum = shifted_conv_all(x, in);
    const auto pc = parseval_check(spectrum, in);
    const auto agree = fft_vs_direct(spectrum, in, 50, ctx.options().seed);
    worst_parseval = std::max(worst_parseval, pc.ratio);
    worst_fft = std::max(worst_fft, agree.max_rel_error);
    rows.push_back({{"X", x}, {"parseval_rel_error", pc.ratio}, {"fft_max_rel_error", agree.max_rel_error},
                    {"worst_h", agree.worst_h}});
  }
  r.pass = worst_parseval <= kParsevalTol && worst_fft <= kFftDirectTol;
  r.summary = fmt::format("max Parseval rel err {:.2e}, max FFT/direct rel err {:.2e} on 50 shifts per X", worst_parseval,
                          worst_fft);
  r.data = {{"rows", rows}};
  return r;
}

CriterionResult resonance(AcceptanceContext& ctx) {
  CriterionResult r{7, "resonance sups", false, 0, 0, {}, {}};
  const bool quick = ctx.options().quick;
  const std::vector<double> xs = quick ? std::vector<double>{1e3, 1e4} : std::vector<double>{1e3, 1e4, 1e5};
  const double top = xs.back();
  const auto& gl2 = ctx.gl2(static_cast<u64>(3 * top) + 2);
  const auto& gl3 = ctx.sym2(static_cast<u64>(2 * top) + 2);
  std::vector<double> s1, s2;
  nlohmann::json rows = nlohmann::json::array();
  for (double x : xs) {
    const auto a = resonance_sup_gl2(x, gl2, ctx.options().workers);
    const auto b = resonance_sup_gl3(x, gl3, ctx.options().workers);
    s2.push_back(a.sup);
    s1.push_back(b.sup);
    rows.push_back({{"X", x}, {"sup_S2_over_sqrtX", a.sup}, {"sup_S1_over_X34", b.sup},
                    {"argmax_S2", a.argmax_alpha}, {"argmax_S1", b.argmax_alpha}});
  }
  auto growth = [](const std::vector<double>& v) {
    double g = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = i + 1; j < v.size(); ++j) g = std::max(g, v[j] / v[i]);
    }
    return g;
  };
  const double g1 = growth(s1), g2 = growth(s2);
  const double m1 = *std::max_element(s1.begin(), s1.end());
  const double m2 = *std::max_element(s2.begin(), s2.end());
  r.pass = m1 <= kResonanceMax && m2 <= kResonanceMax && g1 <= kResonanceGrowthMax && g2 <= kResonanceGrowthMax;
  r.summary = fmt::format("max |S2|/sqrt(X) = {:.3f} (growth {:.2f}), max |S1|/X^0.75 = {:.3f} (growth {:.2f})", m2, g2,
                          m1, g1);
  r.data = {{"rows", rows}, {"growth_S1", g1}, {"growth_S2", g2}};
  return r;
}

CriterionResult voronoi(AcceptanceContext& ctx) {
  CriterionResult r{8, "GL(2) Voronoi identity and transform decay", false, 0, 0, {}, {}};
  const bool quick = ctx.options().quick;
  const u64 q_max = quick ? 5 : 10;
  const std::vector<double> ys = quick ? std::vector<double>{500} : std::vector<double>{500, 1000};
  const auto& stream = ctx.gl2(voronoi_stream_length(q_max, ys));
  const auto rows = voronoi_sweep(q_max, ys, stream, ctx.options().workers);
  double worst = 0;
  bool warned = false;
  for (const auto& row : rows) {
    worst = std::max(worst, row.rel_err);
    warned = warned || row.warn;
  }
  double min_a = 1e300;
  nlohmann::json decay = nlohmann::json::array();
  for (double y : ys) {
    const auto rep = transform_decay_check(y, decay_grid(y));
    min_a = std::min(min_a, rep.value.real());
    decay.push_back({{"Y", y}, {"A", rep.value.real()}, {"last_abs_h_over_y", rep.params["last_abs_h_over_y"]}});
  }
  r.pass = !rows.empty() && worst <= kVoronoiTol && !warned && min_a >= kDecayExponentMin;
  r.summary = fmt::format("{} cases, max rel err {:.2e}; fitted decay A = {:.3f}", rows.size(), worst, min_a);
  r.data = {{"cases", rows.size()}, {"max_rel_err", worst}, {"decay", decay}};
  return r;
}

CriterionResult exponents(AcceptanceContext&) {
  CriterionResult r{9, "exponent pipeline", false, 0, 0, {}, {}};
  const auto p = exponent_pipeline();
  r.pass = p.d_exponent == Rational(2, 3) && p.q_exponent == Rational(6, 11) &&
           p.final_exponent == Rational(21, 22) && p.q_above_half && p.delta_in_range && p.confluent;
  r.summary = fmt::format("D = Q^{}, Q = X^{}, exponent {}, Q >> sqrt(X): {}", to_string(p.d_exponent),
                          to_string(p.q_exponent), to_string(p.final_exponent), p.q_above_half ? "yes" : "no");
  r.data = p.to_json();
  return r;
}

CriterionResult average(AcceptanceContext& ctx) {
  CriterionResult r{10, "average cancellation", false, 0, 0, {}, {}};
  const bool quick = ctx.options().quick;
  const std::vector<double> xs =
      quick ? std::vector<double>{1024, 2048, 4096} : std::vector<double>{4096, 8192, 16384};
  const double top = xs.back();
  const auto& gl2 = ctx.gl2(static_cast<u64>(3 * top) + 2);
  const auto& gl3 = ctx.sym2(static_cast<u64>(2 * top) + 2);
  const ConvolutionInputs in{gl3, gl2};
  std::vector<double> mean_square;
  double worst_ratio = 0;
  nlohmann::json rows = nlohmann::json::array();
  for (double x : xs) {
    const auto spectrum = shifted_conv_all(x, in);
    const double ms = spectrum.sum_squares() / (x * x);
    const auto avg = smoothed_average(std::pow(x, 0.6), SmoothWindow::v_default(), spectrum);
    mean_square.push_back(ms);
    worst_ratio = std::max(worst_ratio, avg.ratio);
    rows.push_back({{"X", x}, {"sum_sq_over_X2", ms}, {"smoothed_ratio", avg.ratio}});
  }
  const double growth = *std::max_element(mean_square.begin(), mean_square.end()) / mean_square.front();
  r.pass = growth <= kMeanSquareGrowthMax && worst_ratio <= kSmoothedRatioMax;
  r.summary = fmt::format("sum |D_h|^2 / X^2 in [{:.4f}, {:.4f}] (growth {:.2f}); max smoothed/trivial = {:.2e}",
                          *std::min_element(mean_square.begin(), mean_square.end()),
                          *std::max_element(mean_square.begin(), mean_square.end()), growth, worst_ratio);
  r.data = {{"rows", rows}, {"growth", growth}};
  return r;
}

}  // namespace

nlohmann::json CriterionResult::to_json() const {
  return {{"id", id}, {"name", name}, {"pass", pass}, {"seconds", seconds},
          {"runtime_limit", runtime_limit}, {"summary", summary}, {"data", data}};
}

AcceptanceContext::AcceptanceContext(AcceptanceOptions options) : options_(std::move(options)) {}
AcceptanceContext::~AcceptanceContext() = default;

const CoefficientStream& AcceptanceContext::gl2(u64 n) {
  if (!gl2_ || gl2_->size() < n) {
    gl2_ = std::make_unique<CoefficientStream>(options_.cache_dir.empty()
                                                   ? lambda_gl2(n)
                                                   : StreamCache(options_.cache_dir).get(StreamKind::Gl2HolomorphicDelta, n));
  }
  return *gl2_;
}

const CoefficientStream& AcceptanceContext::sym2(u64 n) {
  if (!sym2_ || sym2_->size() < n) {
    if (options_.cache_dir.empty()) {
      sym2_ = std::make_unique<CoefficientStream>(sym2_lift(gl2(n), n));
    } else {
      sym2_ = std::make_unique<CoefficientStream>(StreamCache(options_.cache_dir).get(StreamKind::Gl3Sym2Lift, n));
    }
  }
  return *sym2_;
}

CriterionResult run_criterion(int id, AcceptanceContext& ctx) {
  using Fn = CriterionResult (*)(AcceptanceContext&);
  static constexpr Fn table[kCriterionCount] = {identities, weil,   fourier,   correlation, jutila,
                                                parseval,   resonance, voronoi, exponents,   average};
  if (id < 1 || id > kCriterionCount) throw std::out_of_range(fmt::format("no acceptance criterion {}", id));
  const auto start = Clock::now();
  CriterionResult r = table[id - 1](ctx);
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (r.runtime_limit > 0 && r.seconds > r.runtime_limit) {
    r.pass = false;
    r.summary += fmt::format(" [runtime {:.1f} s over the {:.0f} s limit]", r.seconds, r.runtime_limit);
  }
  return r;
}

std::vector<CriterionResult> run_acceptance(AcceptanceContext& ctx, const std::set<int>& only) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (only.empty() || only.contains(id)) out.push_back(run_criterion(id, ctx));
  }
  return out;
}

std::string format_line(const CriterionResult& r) {
  return fmt::format("[{}] {:>2} {} ({:.2f} s): {}", r.pass ? "PASS" : "FAIL", r.id, r.name, r.seconds, r.summary);
}

}  // namespace shiftconv
