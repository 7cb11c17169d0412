#pragma once

#include <complex>
#include <ostream>
#include <span>
#include <vector>

#include "shiftconv/arith.hpp"
#include "shiftconv/coefficients.hpp"
#include "shiftconv/report.hpp"
#include "shiftconv/windows.hpp"

namespace shiftconv {

using cplx = std::complex<double>;

/// a(n) w(n/X) on the integers where w(n/X) can be nonzero: values[k] belongs to
/// n = first + k.
struct WindowedSequence {
  u64 first = 1;
  std::vector<double> values;

  u64 last() const { return first + values.size() - 1; }
  bool empty() const { return values.empty(); }
  /// sum_n values(n) e(alpha n), by phase rotation re-anchored every 64 terms.
  cplx exp_sum(double alpha) const;
};

/// Throws std::invalid_argument when the stream does not reach the window support.
WindowedSequence windowed(const CoefficientStream& stream, const SmoothWindow& w, double x_scale);

/// The two coefficient streams and windows entering D_h(X).
struct ConvolutionInputs {
  const CoefficientStream& gl3;
  const CoefficientStream& gl2;
  SmoothWindow v = SmoothWindow::v_default();
  SmoothWindow w = SmoothWindow::w_default();
};

/// S1(alpha, X) = sum_m lambda_1(1, m) e(alpha m) V(m/X).
cplx resonance_gl3(double alpha, double x_scale, const CoefficientStream& stream,
                   const SmoothWindow& v = SmoothWindow::v_default());
/// S2(alpha, X) = sum_n lambda_2(n) e(-alpha n) W(n/X).
cplx resonance_gl2(double alpha, double x_scale, const CoefficientStream& stream,
                   const SmoothWindow& w = SmoothWindow::w_default());

struct ResonanceSup {
  double x_scale = 0;
  double exponent = 0;   // sup is of |S| / X^exponent
  double sup = 0;
  double argmax_alpha = 0;
  u64 grid_points = 0;   // equally spaced points j/M, M = ceil(16 X)
  u64 farey_points = 0;  // a/q with q <= sqrt(X)
};

ResonanceSup resonance_sup_gl3(double x_scale, const CoefficientStream& stream, unsigned workers = 1,
                               const SmoothWindow& v = SmoothWindow::v_default());
ResonanceSup resonance_sup_gl2(double x_scale, const CoefficientStream& stream, unsigned workers = 1,
                               const SmoothWindow& w = SmoothWindow::w_default());

/// D_h(X) = sum_m lambda_1(1,m) lambda_2(m+h) V(m/X) W((m+h)/X).  Throws
/// std::out_of_range unless |h| <= 3X.
cplx shifted_conv_direct(i64 h, double x_scale, const ConvolutionInputs& in);

class ShiftSpectrum {
 public:
  ShiftSpectrum(double x_scale, i64 h_min, std::vector<cplx> values);

  double x_scale() const { return x_; }
  i64 h_min() const { return h_min_; }
  i64 h_max() const { return h_min_ + static_cast<i64>(values_.size()) - 1; }
  /// D_h, zero outside [h_min, h_max].
  cplx at(i64 h) const;
  std::span<const cplx> values() const { return values_; }
  double sum_squares() const;

 private:
  double x_;
  i64 h_min_;
  std::vector<cplx> values_;
};

/// Every D_h with |h| <= ceil(3X) from one FFT cross-correlation of length
/// next_pow2(8X).
ShiftSpectrum shifted_conv_all(double x_scale, const ConvolutionInputs& in);

void write_spectrum_csv(std::ostream& out, const ShiftSpectrum& spectrum);

/// sum_h |D_h|^2 against (1/M) sum_j |S1(j/M) S2(j/M)|^2 with M = 9 ceil(X).
SumReport parseval_check(double x_scale, const ConvolutionInputs& in);
SumReport parseval_check(const ShiftSpectrum& spectrum, const ConvolutionInputs& in);

struct FftAgreement {
  u64 checked = 0;
  double max_rel_error = 0;
  i64 worst_h = 0;
};

/// FFT spectrum against direct summation at `samples` random shifts in |h| <= 2X.
/// Relative errors are taken against max(|direct|, 1e-6 sqrt(sum a^2 sum b^2)).
FftAgreement fft_vs_direct(const ShiftSpectrum& spectrum, const ConvolutionInputs& in, u64 samples,
                           std::uint64_t seed);

struct SmoothedAverage {
  cplx value{};
  double trivial_bound = 0;  // H max |D_h| over the support of U(h/H)
  double ratio = 0;          // |value| / trivial_bound, 0 when the bound vanishes
};

/// sum_{h >= 1} U(h/H) D_h(X) over the spectrum.  Throws unless 0 < H <= 3X.
SmoothedAverage smoothed_average(double h_scale, const SmoothWindow& u, const ShiftSpectrum& spectrum);

struct DecayFit {
  double slope = 0;
  double intercept = 0;
  std::vector<double> x_used;
  std::vector<double> abs_values;
  std::vector<double> x_excluded;  // points where D_h vanished
};

/// Least-squares slope of log |D_h(X)| against log X.  Needs at least 4 scales.
DecayFit decay_exponent_fit(i64 h, std::span<const double> x_grid, const CoefficientStream& gl3,
                            const CoefficientStream& gl2);

}  // namespace shiftconv
