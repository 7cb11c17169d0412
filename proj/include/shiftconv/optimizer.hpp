#pragma once

#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftconv/rational.hpp"

namespace shiftconv {

/// Exponents over named variables: {"Q": 5/6, "X": 1/2} is Q^{5/6} X^{1/2}.
/// Zero exponents are never stored.
using LinearForm = std::map<std::string, Rational>;

LinearForm make_form(std::initializer_list<std::pair<const char*, Rational>> entries);
std::string to_string(const LinearForm& form);

struct Monomial {
  LinearForm exponents;
  std::string label;

  Rational exponent(const std::string& var) const;
  bool operator==(const Monomial& other) const { return exponents == other.exponents; }
};

/// Sum of monomial terms, up to constants.  At least one term.
class MonomialBound {
 public:
  explicit MonomialBound(std::vector<Monomial> terms);

  std::span<const Monomial> terms() const { return terms_; }
  bool mentions(const std::string& var) const;
  std::string to_string() const;
  nlohmann::json to_json() const;

 private:
  std::vector<Monomial> terms_;
};

/// Replace var by the monomial expr.  Throws std::invalid_argument when var does
/// not occur.
MonomialBound substitute(const MonomialBound& b, const std::string& var, const LinearForm& expr);

/// (sum of terms)^r, up to constants: every exponent times r.
MonomialBound power(const MonomialBound& b, const Rational& r);

/// Append terms; drop exact duplicates keeping the first label.
MonomialBound combine(const MonomialBound& a, const MonomialBound& b);

/// Terms selected by index.
MonomialBound select(const MonomialBound& b, std::span<const std::size_t> indices);

struct Crossing {
  std::size_t i = 0, j = 0;
  Rational at;
  Rational value;
};

struct OptimizeResult {
  std::string var;
  std::string objective_var;
  bool bounded = true;
  Rational optimum;  // exponent of var in terms of objective_var
  Rational value;    // max term exponent there
  LinearForm common;  // factor shared by every term, pulled out first
  std::vector<Rational> slopes, intercepts;
  std::vector<Crossing> crossings;
  std::vector<std::size_t> active;  // terms attaining the max at the optimum

  nlohmann::json to_json() const;
};

/// Minimise over v the largest exponent of objective_var once var = objective_var^v.
/// A factor common to all terms is pulled out first; any other variable left over
/// throws std::invalid_argument ("incomparable").  When no crossing bounds the
/// minimum, bounded is false and optimum/value are left at zero.
OptimizeResult optimize_single(const MonomialBound& b, const std::string& var, const std::string& objective_var);

struct PipelineStep {
  std::string description;
  MonomialBound bound;
};

struct PipelineResult {
  Rational d_exponent;      // D = Q^d
  Rational q_exponent;      // Q = X^q
  Rational final_exponent;  // D_h(X) << X^final
  Rational delta_exponent;  // Delta = X^delta
  bool q_above_half = false;
  bool delta_in_range = false;  // Q^-2 <= Delta <= Q^-1
  bool confluent = false;       // substituting the optimum reproduces the value
  std::vector<PipelineStep> steps;
  OptimizeResult balance, final_step;

  nlohmann::json to_json() const;
};

/// The closing optimisation: terms (DQX + D^{-1/2}Q^2X + D^{1/2}Q^3)^{1/2}, balance
/// the first two in D, add X Delta^{-1/2} Q^{-1} with Delta = X^{-1}, optimise Q.
PipelineResult exponent_pipeline();

void write_trace_text(std::ostream& out, const PipelineResult& result);

}  // namespace shiftconv
