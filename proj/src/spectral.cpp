#include "shiftconv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "shiftconv/exp_sums.hpp"
#include "shiftconv/fft.hpp"
#include "shiftconv/parallel.hpp"
#include "shiftconv/random.hpp"

namespace shiftconv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx unit_phase(double alpha, u64 n) {
  const long double t = static_cast<long double>(alpha) * static_cast<long double>(n);
  const double frac = static_cast<double>(t - std::floor(t));
  return std::polar(1.0, kTwoPi * frac);
}

void require_positive_scale(double x_scale) {
  if (!(x_scale >= 1.0) || !std::isfinite(x_scale)) {
    throw std::invalid_argument("scale X must be a finite number >= 1");
  }
}

struct SupPoint {
  double value = 0;
  double alpha = 0;
};

ResonanceSup resonance_sup(const WindowedSequence& seq, double x_scale, double exponent, int sign,
                           unsigned workers) {
  ResonanceSup out;
  out.x_scale = x_scale;
  out.exponent = exponent;
  const double norm = std::pow(x_scale, exponent);

  const u64 m = static_cast<u64>(std::ceil(16.0 * x_scale));
  std::vector<cplx> buf(m, cplx{});
  for (std::size_t k = 0; k < seq.values.size(); ++k) buf[(seq.first + k) % m] += seq.values[k];
  const auto grid = dft(buf, sign > 0 ? FftSign::Backward : FftSign::Forward);
  for (u64 j = 0; j < m; ++j) {
    const double v = std::abs(grid[j]) / norm;
    if (v > out.sup) {
      out.sup = v;
      out.argmax_alpha = static_cast<double>(j) / static_cast<double>(m);
    }
  }
  out.grid_points = m;

  const u64 q_max = static_cast<u64>(std::floor(std::sqrt(x_scale)));
  struct PerQ {
    SupPoint best;
    u64 count = 0;
  };
  const auto per_q = parallel_map(q_max, workers, [&](std::size_t i) {
    const u64 q = i + 1;
    std::vector<double> residue(q, 0.0);
    for (std::size_t k = 0; k < seq.values.size(); ++k) residue[(seq.first + k) % q] += seq.values[k];
    const TwiddleTable tw(q);
    PerQ r;
    for (u64 a = 0; a < q; ++a) {
      if (gcd(a, q) != 1) continue;
      cplx s{};
      for (u64 res = 0; res < q; ++res) {
        const u64 idx = (a * res) % q;
        s += residue[res] * tw[sign > 0 ? idx : (q - idx) % q];
      }
      ++r.count;
      const double v = std::abs(s) / norm;
      if (v > r.best.value) r.best = {v, static_cast<double>(a) / static_cast<double>(q)};
    }
    return r;
  });
  for (const auto& r : per_q) {
    out.farey_points += r.count;
    if (r.best.value > out.sup) {
      out.sup = r.best.value;
      out.argmax_alpha = r.best.alpha;
    }
  }
  return out;
}

}  // namespace

cplx WindowedSequence::exp_sum(double alpha) const {
  const long double step_t = static_cast<long double>(alpha) - std::floor(static_cast<long double>(alpha));
  const cplx step = std::polar(1.0, kTwoPi * static_cast<double>(step_t));
  CompensatedSum acc;
  cplx z{};
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k % 64 == 0) {
      z = unit_phase(alpha, first + k);
    } else {
      z *= step;
    }
    acc.add(values[k] * z);
  }
  return acc.value();
}

WindowedSequence windowed(const CoefficientStream& stream, const SmoothWindow& w, double x_scale) {
  require_positive_scale(x_scale);
  WindowedSequence seq;
  if (w.empty()) return seq;
  const double lo = w.lo() * x_scale;
  const double hi = w.hi() * x_scale;
  const u64 first = static_cast<u64>(std::max(0.0, std::floor(lo))) + 1;
  const double top = std::ceil(hi) - 1.0;
  if (top < static_cast<double>(first)) return seq;
  const u64 last = static_cast<u64>(top);
  if (last > stream.size()) {
    throw std::invalid_argument("coefficient stream of length " + std::to_string(stream.size()) +
                                " does not cover the window support up to " + std::to_string(last));
  }
  seq.first = first;
  seq.values.resize(last - first + 1);
  for (u64 n = first; n <= last; ++n) {
    seq.values[n - first] = stream(n) * w(static_cast<double>(n) / x_scale);
  }
  return seq;
}

cplx resonance_gl3(double alpha, double x_scale, const CoefficientStream& stream, const SmoothWindow& v) {
  return windowed(stream, v, x_scale).exp_sum(alpha);
}

cplx resonance_gl2(double alpha, double x_scale, const CoefficientStream& stream, const SmoothWindow& w) {
  return windowed(stream, w, x_scale).exp_sum(-alpha);
}

ResonanceSup resonance_sup_gl3(double x_scale, const CoefficientStream& stream, unsigned workers,
                               const SmoothWindow& v) {
  return resonance_sup(windowed(stream, v, x_scale), x_scale, 0.75, +1, workers);
}

ResonanceSup resonance_sup_gl2(double x_scale, const CoefficientStream& stream, unsigned workers,
                               const SmoothWindow& w) {
  return resonance_sup(windowed(stream, w, x_scale), x_scale, 0.5, -1, workers);
}

cplx shifted_conv_direct(i64 h, double x_scale, const ConvolutionInputs& in) {
  require_positive_scale(x_scale);
  if (static_cast<double>(std::abs(h)) > 3.0 * x_scale) {
    throw std::out_of_range("shift " + std::to_string(h) + " outside |h| <= 3X");
  }
  const auto a = windowed(in.gl3, in.v, x_scale);
  const auto b = windowed(in.gl2, in.w, x_scale);
  CompensatedSum acc;
  if (a.empty() || b.empty()) return {};
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    const i64 n = static_cast<i64>(a.first + k) + h;
    if (n < static_cast<i64>(b.first) || n > static_cast<i64>(b.last())) continue;
    acc.add(a.values[k] * b.values[static_cast<u64>(n) - b.first]);
  }
  return acc.value();
}

ShiftSpectrum::ShiftSpectrum(double x_scale, i64 h_min, std::vector<cplx> values)
    : x_(x_scale), h_min_(h_min), values_(std::move(values)) {}

cplx ShiftSpectrum::at(i64 h) const {
  if (h < h_min_ || h > h_max()) return {};
  return values_[static_cast<std::size_t>(h - h_min_)];
}

double ShiftSpectrum::sum_squares() const {
  double s = 0.0;
  for (const auto& z : values_) s += std::norm(z);
  return s;
}

ShiftSpectrum shifted_conv_all(double x_scale, const ConvolutionInputs& in) {
  require_positive_scale(x_scale);
  const auto a = windowed(in.gl3, in.v, x_scale);
  const auto b = windowed(in.gl2, in.w, x_scale);
  const i64 h_span = static_cast<i64>(std::ceil(3.0 * x_scale));
  const std::size_t len = next_pow2(static_cast<std::size_t>(std::ceil(8.0 * x_scale)));
  std::vector<cplx> va(len, cplx{}), vb(len, cplx{});
  for (std::size_t k = 0; k < a.values.size(); ++k) va[a.first + k] = a.values[k];
  for (std::size_t k = 0; k < b.values.size(); ++k) vb[b.first + k] = b.values[k];
  const auto fa = dft(va, FftSign::Forward);
  const auto fb = dft(vb, FftSign::Forward);
  std::vector<cplx> prod(len);
  for (std::size_t k = 0; k < len; ++k) prod[k] = std::conj(fa[k]) * fb[k];
  const auto corr = dft(prod, FftSign::Backward);
  std::vector<cplx> values(static_cast<std::size_t>(2 * h_span + 1));
  const double inv_len = 1.0 / static_cast<double>(len);
  for (i64 h = -h_span; h <= h_span; ++h) {
    const std::size_t idx = static_cast<std::size_t>(h < 0 ? static_cast<i64>(len) + h : h);
    values[static_cast<std::size_t>(h + h_span)] = corr[idx] * inv_len;
  }
  return {x_scale, -h_span, std::move(values)};
}

void write_spectrum_csv(std::ostream& out, const ShiftSpectrum& spectrum) {
  out << "h,re,im,abs\n";
  out.precision(17);
  for (i64 h = spectrum.h_min(); h <= spectrum.h_max(); ++h) {
    const cplx z = spectrum.at(h);
    out << h << ',' << z.real() << ',' << z.imag() << ',' << std::abs(z) << '\n';
  }
}

SumReport parseval_check(double x_scale, const ConvolutionInputs& in) {
  return parseval_check(shifted_conv_all(x_scale, in), in);
}

SumReport parseval_check(const ShiftSpectrum& spectrum, const ConvolutionInputs& in) {
  const double x_scale = spectrum.x_scale();
  const auto a = windowed(in.gl3, in.v, x_scale);
  const auto b = windowed(in.gl2, in.w, x_scale);
  const std::size_t m = 9 * static_cast<std::size_t>(std::ceil(x_scale));
  std::vector<cplx> va(m, cplx{}), vb(m, cplx{});
  for (std::size_t k = 0; k < a.values.size(); ++k) va[(a.first + k) % m] += a.values[k];
  for (std::size_t k = 0; k < b.values.size(); ++k) vb[(b.first + k) % m] += b.values[k];
  const auto s1 = dft(va, FftSign::Backward);
  const auto s2 = dft(vb, FftSign::Forward);
  CompensatedSum rhs_acc;
  for (std::size_t j = 0; j < m; ++j) rhs_acc.add(std::norm(s1[j] * s2[j]));
  const double rhs = rhs_acc.value().real() / static_cast<double>(m);
  const double lhs = spectrum.sum_squares();

  SumReport r;
  r.name = "parseval";
  r.value = lhs;
  r.bound = rhs;
  r.ratio = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
  r.pass = lhs == rhs || r.ratio <= 1e-6;
  r.params = {{"X", x_scale},
              {"grid", m},
              {"lhs", lhs},
              {"rhs", rhs},
              {"lhs_over_X2", lhs / (x_scale * x_scale)},
              {"v", in.v.to_json()},
              {"w", in.w.to_json()},
              {"gl3", to_string(in.gl3.kind())},
              {"gl2", to_string(in.gl2.kind())}};
  return r;
}

FftAgreement fft_vs_direct(const ShiftSpectrum& spectrum, const ConvolutionInputs& in, u64 samples,
                           std::uint64_t seed) {
  const double x_scale = spectrum.x_scale();
  const auto a = windowed(in.gl3, in.v, x_scale);
  const auto b = windowed(in.gl2, in.w, x_scale);
  double sa = 0, sb = 0;
  for (double v : a.values) sa += v * v;
  for (double v : b.values) sb += v * v;
  const double floor_value = 1e-6 * std::sqrt(sa * sb);
  CounterRng rng(seed, 0x5eed);
  const i64 span = static_cast<i64>(std::floor(2.0 * x_scale));
  FftAgreement out;
  for (u64 i = 0; i < samples; ++i) {
    const i64 h = rng.uniform(-span, span);
    const cplx direct = shifted_conv_direct(h, x_scale, in);
    const double err = std::abs(spectrum.at(h) - direct) / std::max(std::abs(direct), floor_value);
    ++out.checked;
    if (err > out.max_rel_error) {
      out.max_rel_error = err;
      out.worst_h = h;
    }
  }
  return out;
}

SmoothedAverage smoothed_average(double h_scale, const SmoothWindow& u, const ShiftSpectrum& spectrum) {
  if (!(h_scale > 0.0) || h_scale > 3.0 * spectrum.x_scale()) {
    throw std::out_of_range("smoothed_average: H must lie in (0, 3X]");
  }
  SmoothedAverage out;
  double max_abs = 0.0;
  CompensatedSum acc;
  for (i64 h = 1; h <= spectrum.h_max(); ++h) {
    const double weight = u(static_cast<double>(h) / h_scale);
    if (weight == 0.0) continue;
    const cplx d = spectrum.at(h);
    acc.add(weight * d);
    max_abs = std::max(max_abs, std::abs(d));
  }
  out.value = acc.value();
  out.trivial_bound = h_scale * max_abs;
  out.ratio = out.trivial_bound > 0.0 ? std::abs(out.value) / out.trivial_bound : 0.0;
  return out;
}

DecayFit decay_exponent_fit(i64 h, std::span<const double> x_grid, const CoefficientStream& gl3,
                            const CoefficientStream& gl2) {
  if (x_grid.size() < 4) throw std::invalid_argument("decay_exponent_fit: need at least 4 scales");
  const ConvolutionInputs in{gl3, gl2};
  DecayFit fit;
  for (double x : x_grid) {
    const double v = std::abs(shifted_conv_direct(h, x, in));
    if (v > 0.0) {
      fit.x_used.push_back(x);
      fit.abs_values.push_back(v);
    } else {
      fit.x_excluded.push_back(x);
    }
  }
  const std::size_t n = fit.x_used.size();
  if (n < 2) throw std::domain_error("decay_exponent_fit: fewer than two nonzero values");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(fit.x_used[i]);
    const double ly = std::log(fit.abs_values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  fit.slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / dn;
  return fit;
}

}  // namespace shiftconv
