#include "shiftconv/circle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "shiftconv/exp_sums.hpp"
#include "shiftconv/parallel.hpp"

namespace shiftconv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double y) { return y - std::floor(y); }

// Multiple of 2^-53, so that c +- delta is exact for most centres c.
double snap_delta(double delta) { return std::ldexp(std::round(std::ldexp(delta, 53)), -53); }

// Half-open circular interval [c - delta, c + delta) in coordinates of [0, 1).
struct Arc {
  double left, right;
  bool covers_zero;
};

template <class Fn>
void for_each_arc(const ModuliSet& ms, Fn&& fn) {
  for (u64 q : ms.moduli) {
    for (u64 a = 1; a <= q; ++a) {
      if (gcd(a, q) != 1) continue;
      const double c = static_cast<double>(a) / static_cast<double>(q);
      const double l = c - ms.delta;
      const double r = c + ms.delta;
      // Some integer k with l <= k < r.
      const bool zero = std::ceil(l) < r;
      fn(Arc{frac(l), frac(r), zero});
    }
  }
}

u64 totient_sum(std::span<const u64> moduli) {
  u64 s = 0;
  for (u64 q : moduli) s += euler_phi(q);
  return s;
}

}  // namespace

std::string_view to_string(ModuliMode mode) {
  switch (mode) {
    case ModuliMode::TwoModThree: return "two-mod-three";
    case ModuliMode::AllSquarefree: return "all-squarefree";
    case ModuliMode::Custom: return "custom";
  }
  return "unknown";
}

ModuliMode moduli_mode_from_string(std::string_view name) {
  if (name == "two-mod-three") return ModuliMode::TwoModThree;
  if (name == "all-squarefree" || name == "all") return ModuliMode::AllSquarefree;
  throw std::invalid_argument("unknown moduli mode: " + std::string(name));
}

ModuliSet build_moduli_set(double q_scale, double eta, ModuliMode mode, std::optional<double> delta) {
  if (!(q_scale >= 4.0) || !std::isfinite(q_scale)) throw std::invalid_argument("moduli set needs Q >= 4");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in (0, 1]");
  if (mode == ModuliMode::Custom) throw std::invalid_argument("use make_moduli_set for custom moduli");
  const double d = delta.value_or(std::pow(q_scale, -1.5));
  const double lo = 1.0 / (q_scale * q_scale);
  const double hi = 1.0 / q_scale;
  if (!(d >= lo * (1 - 1e-12) && d <= hi * (1 + 1e-12))) {
    throw std::invalid_argument("Delta must lie in [Q^-2, Q^-1]");
  }

  ModuliSet ms;
  ms.q_scale = q_scale;
  ms.eta = eta;
  ms.mode = mode;
  ms.delta = snap_delta(d);
  const double prime_cap = std::pow(q_scale, eta) * (1 + 1e-12);
  const u64 first = static_cast<u64>(std::floor(q_scale / 2.0)) + 1;
  const u64 last = static_cast<u64>(std::floor(q_scale));
  for (u64 q = first; q <= last; ++q) {
    const auto f = squarefree_factor(q);
    if (!f) continue;
    if (mode == ModuliMode::TwoModThree) {
      const auto ps = f->primes();
      const bool ok = std::all_of(ps.begin(), ps.end(), [&](u64 p) {
        return p % 3 == 2 && static_cast<double>(p) <= prime_cap;
      });
      if (!ok) continue;
    }
    ms.moduli.push_back(q);
    ms.phi_mass += f->totient();
  }
  if (ms.moduli.empty()) {
    ms.warnings.push_back("moduli set is empty for Q = " + std::to_string(q_scale) +
                          ", eta = " + std::to_string(eta) + " in " + std::string(to_string(mode)) + " mode");
  }
  return ms;
}

ModuliSet make_moduli_set(std::vector<u64> moduli, double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) throw std::invalid_argument("Delta must lie in (0, 1/2]");
  std::sort(moduli.begin(), moduli.end());
  moduli.erase(std::unique(moduli.begin(), moduli.end()), moduli.end());
  for (u64 q : moduli) {
    if (q == 0 || !is_squarefree(q)) throw std::invalid_argument(std::to_string(q) + " is not squarefree");
  }
  ModuliSet ms;
  ms.mode = ModuliMode::Custom;
  ms.q_scale = moduli.empty() ? 0.0 : static_cast<double>(moduli.back());
  ms.delta = snap_delta(delta);
  ms.phi_mass = totient_sum(moduli);
  ms.moduli = std::move(moduli);
  return ms;
}

void write_moduli_text(std::ostream& out, const ModuliSet& ms) {
  out.precision(17);
  out << "# Q=" << ms.q_scale << " eta=" << ms.eta << " mode=" << to_string(ms.mode)
      << " delta=" << ms.delta << " phi=" << ms.phi_mass << " count=" << ms.moduli.size() << '\n';
  for (u64 q : ms.moduli) out << q << '\n';
}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.empty() || breakpoints_.size() != values_.size()) {
    throw std::invalid_argument("StepFunction needs one value per breakpoint");
  }
  if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end()) || breakpoints_.front() < 0.0 ||
      breakpoints_.back() >= 1.0) {
    throw std::invalid_argument("StepFunction breakpoints must be sorted in [0, 1)");
  }
}

double StepFunction::operator()(double x) const {
  const double t = frac(x);
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  if (it == breakpoints_.begin()) return values_.back();
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

double StepFunction::piece_length(std::size_t i) const {
  if (values_.size() == 1) return 1.0;
  if (i + 1 < breakpoints_.size()) return breakpoints_[i + 1] - breakpoints_[i];
  return 1.0 - breakpoints_.back() + breakpoints_.front();
}

double StepFunction::integral() const {
  long double s = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += static_cast<long double>(piece_length(i)) * values_[i];
  return static_cast<double>(s);
}

double StepFunction::l2_distance_squared(double c) const {
  long double s = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const long double d = c - values_[i];
    s += static_cast<long double>(piece_length(i)) * d * d;
  }
  return static_cast<double>(s);
}

StepFunction eval_I(const ModuliSet& ms) {
  if (ms.empty() || ms.phi_mass == 0) throw std::invalid_argument("eval_I: moduli set is empty");
  const double height = 1.0 / (2.0 * ms.delta * static_cast<double>(ms.phi_mass));
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * ms.phi_mass);
  i64 count = 0;
  for_each_arc(ms, [&](const Arc& arc) {
    if (arc.covers_zero) ++count;
    if (arc.left > 0.0) events.emplace_back(arc.left, +1);
    if (arc.right > 0.0) events.emplace_back(arc.right, -1);
  });
  std::sort(events.begin(), events.end());

  std::vector<double> points{0.0};
  std::vector<i64> counts{count};
  for (std::size_t i = 0; i < events.size();) {
    const double pos = events[i].first;
    for (; i < events.size() && events[i].first == pos; ++i) count += events[i].second;
    if (count == counts.back()) continue;
    points.push_back(pos);
    counts.push_back(count);
  }
  if (counts.size() > 1 && counts.back() == counts.front()) {
    points.erase(points.begin());
    counts.erase(counts.begin());
  }
  std::vector<double> values(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) values[i] = static_cast<double>(counts[i]) * height;
  return {std::move(points), std::move(values)};
}

double eval_I_naive(const ModuliSet& ms, double x) {
  if (ms.empty()) return 0.0;
  u64 hits = 0;
  for (u64 q : ms.moduli) {
    for (u64 a = 1; a <= q; ++a) {
      if (gcd(a, q) != 1) continue;
      // Same arc [c - delta, c + delta) as eval_I, tested circularly.
      const double c = static_cast<double>(a) / static_cast<double>(q);
      const double l = c - ms.delta;
      const double t = l + frac(x - l);
      if (t < c + ms.delta) ++hits;
    }
  }
  const double height = 1.0 / (2.0 * ms.delta * static_cast<double>(ms.phi_mass));
  return static_cast<double>(hits) * height;
}

SumReport variance(const ModuliSet& ms) {
  SumReport r;
  r.name = "jutila_variance";
  r.params = {{"Q", ms.q_scale},
              {"eta", ms.eta},
              {"mode", to_string(ms.mode)},
              {"delta", ms.delta},
              {"phi", ms.phi_mass},
              {"moduli", ms.moduli.size()}};
  if (ms.empty()) {
    r.value = 1.0;
    r.ratio = 0.0;
    r.warnings.push_back("empty moduli set: I is identically 0");
    return r;
  }
  const auto f = eval_I(ms);
  const double integral = f.l2_distance_squared(1.0);
  const double phi = static_cast<double>(ms.phi_mass);
  const double q2 = ms.q_scale * ms.q_scale;
  r.value = integral;
  r.bound = q2 / (ms.delta * phi * phi);  // variance bound with constant 1
  r.ratio = integral * ms.delta * phi * phi / q2;
  r.params["integral_I"] = f.integral();
  r.params["pieces"] = f.pieces();
  return r;
}

cplx dstar_h(i64 h, double x_scale, const ModuliSet& ms, const ConvolutionInputs& in, unsigned workers) {
  const auto kernel = eval_I(ms);
  const auto a = windowed(in.gl3, in.v, x_scale);
  const auto b = windowed(in.gl2, in.w, x_scale);
  if (in.gl2.size() < static_cast<u64>(3.0 * x_scale) - 1) {
    throw std::invalid_argument("dstar_h: gl2 stream shorter than 3X");
  }
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& nodes = Rule::abscissa();
  const auto& weights = Rule::weights();
  const double panel_max = 1.0 / (2.0 * x_scale);
  const double hd = static_cast<double>(h);

  auto integrate = [&](double lo, double hi) {
    cplx total{};
    if (hi <= lo) return total;
    const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / panel_max));
    const double width = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = lo + (static_cast<double>(p) + 0.5) * width;
      const double half = 0.5 * width;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        for (int sgn : {-1, 1}) {
          const double x = mid + sgn * half * nodes[k];
          const cplx f = std::polar(1.0, kTwoPi * frac(x * hd)) * a.exp_sum(x) * b.exp_sum(-x);
          total += weights[k] * half * f;
        }
      }
    }
    return total;
  };

  const auto bps = kernel.breakpoints();
  const std::size_t n = kernel.pieces();
  const auto per_piece = parallel_map(n, workers, [&](std::size_t i) {
    const double v = kernel.values()[i];
    if (v == 0.0) return cplx{};
    if (n == 1) return v * integrate(0.0, 1.0);
    if (i + 1 < n) return v * integrate(bps[i], bps[i + 1]);
    return v * (integrate(bps[i], 1.0) + integrate(0.0, bps[0]));
  });
  cplx total{};
  for (const auto& z : per_piece) total += z;
  return total;
}

double ramanujan_sum(u64 q, i64 t) {
  const u64 g = gcd(q, static_cast<u64>(t < 0 ? -t : t));
  const u64 r = q / g;
  const int mu = mobius(r);
  if (mu == 0) return 0.0;
  return mu * static_cast<double>(euler_phi(q)) / static_cast<double>(euler_phi(r));
}

cplx dstar_h_fourier(i64 h, const ModuliSet& ms, const ShiftSpectrum& spectrum) {
  if (ms.empty()) throw std::invalid_argument("dstar_h_fourier: moduli set is empty");
  const double phi = static_cast<double>(ms.phi_mass);
  cplx total{};
  for (i64 j = spectrum.h_min(); j <= spectrum.h_max(); ++j) {
    const cplx d = spectrum.at(j);
    if (d == cplx{}) continue;
    const i64 t = j - h;
    double c = 0.0;
    for (u64 q : ms.moduli) c += ramanujan_sum(q, t);
    const double y = kTwoPi * static_cast<double>(t) * ms.delta;
    const double sinc = t == 0 ? 1.0 : std::sin(y) / y;
    total += d * (c * sinc / phi);
  }
  return total;
}

SumReport dstar_gap(i64 h, double x_scale, const ModuliSet& ms, const ConvolutionInputs& in, unsigned workers) {
  const cplx d = shifted_conv_direct(h, x_scale, in);
  const cplx ds = dstar_h(h, x_scale, ms, in, workers);
  const double bound = x_scale / (std::sqrt(ms.delta) * ms.q_scale);
  SumReport r;
  r.name = "dstar_gap";
  r.value = d - ds;
  r.bound = bound;
  r.ratio = std::abs(d - ds) / bound;
  r.params = {{"h", h},
              {"X", x_scale},
              {"Q", ms.q_scale},
              {"delta", ms.delta},
              {"phi", ms.phi_mass},
              {"mode", to_string(ms.mode)},
              {"D_re", d.real()},
              {"D_im", d.imag()},
              {"Dstar_re", ds.real()},
              {"Dstar_im", ds.imag()}};
  return r;
}

}  // namespace shiftconv
