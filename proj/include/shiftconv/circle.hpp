#pragma once

#include <complex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "shiftconv/arith.hpp"
#include "shiftconv/report.hpp"
#include "shiftconv/spectral.hpp"

namespace shiftconv {

enum class ModuliMode { TwoModThree, AllSquarefree, Custom };

std::string_view to_string(ModuliMode mode);
ModuliMode moduli_mode_from_string(std::string_view name);

struct ModuliSet {
  double q_scale = 0;
  double eta = 1;
  ModuliMode mode = ModuliMode::AllSquarefree;
  std::vector<u64> moduli;  // sorted
  u64 phi_mass = 0;         // sum of phi(q)
  double delta = 0;
  std::vector<std::string> warnings;

  bool empty() const { return moduli.empty(); }
};

/// Squarefree q in (Q/2, Q]; two-mod-three mode keeps only q whose primes are 2 mod 3
/// and <= Q^eta.  Delta defaults to Q^{-3/2} and must lie in [Q^-2, Q^-1].
/// An empty result carries a warning instead of throwing.
ModuliSet build_moduli_set(double q_scale, double eta, ModuliMode mode,
                           std::optional<double> delta = std::nullopt);

/// Arbitrary squarefree moduli with no range checks on delta (0 < delta <= 1/2).
/// Both builders round delta to a multiple of 2^-53.
ModuliSet make_moduli_set(std::vector<u64> moduli, double delta);

void write_moduli_text(std::ostream& out, const ModuliSet& ms);

/// Piecewise-constant function on R/Z.  values[i] holds on [breakpoints[i],
/// breakpoints[i+1]); the last value wraps around through 0.  Adjacent equal
/// values are merged.
class StepFunction {
 public:
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  double operator()(double x) const;
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  std::size_t pieces() const { return values_.size(); }

  /// Length of piece i (the last piece includes the wrap).
  double piece_length(std::size_t i) const;
  double integral() const;
  /// Integral of |c - f|^2 over the circle.
  double l2_distance_squared(double c) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// I(x) = (1/(2 Delta Phi)) sum_q sum*_a 1[|x - a/q| < Delta] as an exact step function.
/// Throws std::invalid_argument on an empty set.
StepFunction eval_I(const ModuliSet& ms);

/// Same kernel by direct summation of indicators at one point.
double eval_I_naive(const ModuliSet& ms, double x);

/// Exact integral of |1 - I|^2 and the ratio of (1/(Delta Q^2)) that integral to
/// 1/(Delta Phi)^2.  An empty set reports integral 1 with ratio 0 and a warning.
SumReport variance(const ModuliSet& ms);

/// D*_h = integral of I(x) e(xh) S1(x) S2(x), Gauss-Legendre panels on every piece
/// of I with panels of length <= 1/(2X) (20 nodes each).
cplx dstar_h(i64 h, double x_scale, const ModuliSet& ms, const ConvolutionInputs& in, unsigned workers = 1);

/// Fourier coefficient route: D*_h = sum_j D_j hatI(j - h) with
/// hatI(t) = (1/Phi) sum_q c_q(t) sinc(2 pi t Delta).
cplx dstar_h_fourier(i64 h, const ModuliSet& ms, const ShiftSpectrum& spectrum);

/// Ramanujan sum c_q(t).
double ramanujan_sum(u64 q, i64 t);

/// |D_h - D*_h| against X / (sqrt(Delta) Q).
SumReport dstar_gap(i64 h, double x_scale, const ModuliSet& ms, const ConvolutionInputs& in,
                    unsigned workers = 1);

}  // namespace shiftconv
