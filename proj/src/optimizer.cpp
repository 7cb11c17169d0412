#include "shiftconv/optimizer.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

namespace shiftconv {

namespace {

void prune(LinearForm& form) {
  std::erase_if(form, [](const auto& kv) { return kv.second == 0; });
}

nlohmann::json form_json(const LinearForm& form) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [var, e] : form) out[var] = shiftconv::to_string(e);
  return out;
}

}  // namespace

LinearForm make_form(std::initializer_list<std::pair<const char*, Rational>> entries) {
  LinearForm form;
  for (const auto& [var, e] : entries) form[var] += e;
  prune(form);
  return form;
}

std::string to_string(const LinearForm& form) {
  if (form.empty()) return "1";
  std::string out;
  for (const auto& [var, e] : form) {
    if (!out.empty()) out += ' ';
    out += e == 1 ? var : fmt::format("{}^{{{}}}", var, shiftconv::to_string(e));
  }
  return out;
}

Rational Monomial::exponent(const std::string& var) const {
  const auto it = exponents.find(var);
  return it == exponents.end() ? Rational(0) : it->second;
}

MonomialBound::MonomialBound(std::vector<Monomial> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("MonomialBound needs at least one term");
  for (auto& t : terms_) prune(t.exponents);
}

bool MonomialBound::mentions(const std::string& var) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const Monomial& t) { return t.exponents.contains(var); });
}

std::string MonomialBound::to_string() const {
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += " + ";
    out += shiftconv::to_string(t.exponents);
  }
  return out;
}

nlohmann::json MonomialBound::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : terms_) out.push_back({{"label", t.label}, {"exponents", form_json(t.exponents)}});
  return out;
}

MonomialBound substitute(const MonomialBound& b, const std::string& var, const LinearForm& expr) {
  if (!b.mentions(var)) throw std::invalid_argument("substitute: unknown variable " + var);
  std::vector<Monomial> terms;
  for (const auto& t : b.terms()) {
    Monomial m = t;
    const Rational e = m.exponent(var);
    m.exponents.erase(var);
    for (const auto& [v, c] : expr) m.exponents[v] += e * c;
    prune(m.exponents);
    terms.push_back(std::move(m));
  }
  return MonomialBound(std::move(terms));
}

MonomialBound power(const MonomialBound& b, const Rational& r) {
  std::vector<Monomial> terms(b.terms().begin(), b.terms().end());
  for (auto& t : terms) {
    for (auto& [v, e] : t.exponents) e *= r;
  }
  return MonomialBound(std::move(terms));
}

MonomialBound combine(const MonomialBound& a, const MonomialBound& b) {
  std::vector<Monomial> terms;
  for (auto part : {a.terms(), b.terms()}) {
    for (const auto& t : part) {
      if (std::find(terms.begin(), terms.end(), t) == terms.end()) terms.push_back(t);
    }
  }
  return MonomialBound(std::move(terms));
}

MonomialBound select(const MonomialBound& b, std::span<const std::size_t> indices) {
  std::vector<Monomial> terms;
  for (std::size_t i : indices) {
    if (i >= b.terms().size()) throw std::out_of_range("select: term index");
    terms.push_back(b.terms()[i]);
  }
  return MonomialBound(std::move(terms));
}

nlohmann::json OptimizeResult::to_json() const {
  nlohmann::json cross = nlohmann::json::array();
  for (const auto& c : crossings) {
    cross.push_back({{"terms", {c.i, c.j}}, {"at", shiftconv::to_string(c.at)}, {"value", shiftconv::to_string(c.value)}});
  }
  nlohmann::json lines = nlohmann::json::array();
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    lines.push_back({{"slope", shiftconv::to_string(slopes[i])}, {"intercept", shiftconv::to_string(intercepts[i])}});
  }
  return {{"var", var},
          {"objective", objective_var},
          {"bounded", bounded},
          {"optimum", shiftconv::to_string(optimum)},
          {"value", shiftconv::to_string(value)},
          {"common_factor", form_json(common)},
          {"lines", lines},
          {"crossings", cross},
          {"active", active}};
}

OptimizeResult optimize_single(const MonomialBound& b, const std::string& var, const std::string& objective_var) {
  if (var == objective_var) throw std::invalid_argument("optimize_single: var and objective coincide");
  OptimizeResult r;
  r.var = var;
  r.objective_var = objective_var;

  const auto terms = b.terms();
  std::vector<LinearForm> forms;
  for (const auto& t : terms) forms.push_back(t.exponents);

  // Pull out every variable other than var/objective that has the same exponent in all terms.
  for (const auto& [v, e] : forms.front()) {
    if (v == var || v == objective_var) continue;
    const bool shared = std::all_of(forms.begin(), forms.end(), [&](const LinearForm& f) {
      const auto it = f.find(v);
      return it != f.end() && it->second == e;
    });
    if (shared) r.common[v] = e;
  }
  for (auto& f : forms) {
    for (const auto& [v, e] : r.common) f.erase(v);
    for (const auto& [v, e] : f) {
      if (v != var && v != objective_var) throw std::invalid_argument("optimize_single: incomparable terms in " + v);
    }
    const auto slope = f.find(var);
    const auto intercept = f.find(objective_var);
    r.slopes.push_back(slope == f.end() ? Rational(0) : slope->second);
    r.intercepts.push_back(intercept == f.end() ? Rational(0) : intercept->second);
  }

  const std::size_t n = forms.size();
  auto max_at = [&](const Rational& v) {
    Rational best = r.slopes[0] * v + r.intercepts[0];
    for (std::size_t i = 1; i < n; ++i) best = std::max(best, Rational(r.slopes[i] * v + r.intercepts[i]));
    return best;
  };

  const bool any_pos = std::any_of(r.slopes.begin(), r.slopes.end(), [](const Rational& s) { return s > 0; });
  const bool any_neg = std::any_of(r.slopes.begin(), r.slopes.end(), [](const Rational& s) { return s < 0; });
  if (!any_pos && !any_neg) {
    r.value = max_at(Rational(0));
  } else if (!any_pos || !any_neg) {
    r.bounded = false;
    return r;
  }

  if (any_pos && any_neg) {
    std::optional<Rational> best_at, best_value;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (r.slopes[i] == r.slopes[j]) continue;
        const Rational at = (r.intercepts[j] - r.intercepts[i]) / (r.slopes[i] - r.slopes[j]);
        const Rational value = max_at(at);
        r.crossings.push_back({i, j, at, value});
        if (!best_value || value < *best_value || (value == *best_value && at < *best_at)) {
          best_value = value;
          best_at = at;
        }
      }
    }
    r.optimum = *best_at;
    r.value = *best_value;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (r.slopes[i] * r.optimum + r.intercepts[i] == r.value) r.active.push_back(i);
  }
  return r;
}

nlohmann::json PipelineResult::to_json() const {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& s : steps) trace.push_back({{"step", s.description}, {"terms", s.bound.to_json()}, {"text", s.bound.to_string()}});
  return {{"D", "Q^{" + shiftconv::to_string(d_exponent) + "}"},
          {"Q", "X^{" + shiftconv::to_string(q_exponent) + "}"},
          {"Delta", "X^{" + shiftconv::to_string(delta_exponent) + "}"},
          {"exponent", shiftconv::to_string(final_exponent)},
          {"q_above_half", q_above_half},
          {"delta_in_range", delta_in_range},
          {"confluent", confluent},
          {"balance", balance.to_json()},
          {"final", final_step.to_json()},
          {"trace", trace}};
}

PipelineResult exponent_pipeline() {
  PipelineResult out;
  const MonomialBound squared({{make_form({{"D", 1}, {"Q", 1}, {"X", 1}}), "DQX"},
                               {make_form({{"D", Rational(-1, 2)}, {"Q", 2}, {"X", 1}}), "D^{-1/2}Q^2X"},
                               {make_form({{"D", Rational(1, 2)}, {"Q", 3}}), "D^{1/2}Q^3"}});
  out.steps.push_back({"squared dual bound", squared});

  const std::size_t first_two[] = {0, 1};
  out.balance = optimize_single(select(squared, first_two), "D", "Q");
  out.d_exponent = out.balance.optimum;

  const auto balanced = substitute(squared, "D", make_form({{"Q", out.d_exponent}}));
  out.steps.push_back({"D = Q^{" + shiftconv::to_string(out.d_exponent) + "}", balanced});

  // combine drops the now equal first two terms
  const auto dstar = power(combine(MonomialBound({balanced.terms().front()}), balanced), Rational(1, 2));
  out.steps.push_back({"square root", dstar});

  out.delta_exponent = -1;
  const MonomialBound approximation({{make_form({{"X", 1}, {"Delta", Rational(-1, 2)}, {"Q", -1}}), "X/(sqrt(Delta)Q)"}});
  const auto with_gap = combine(dstar, approximation);
  out.steps.push_back({"add approximation error", with_gap});

  const auto in_x = substitute(with_gap, "Delta", make_form({{"X", out.delta_exponent}}));
  out.steps.push_back({"Delta = X^{-1}", in_x});

  out.final_step = optimize_single(in_x, "Q", "X");
  out.q_exponent = out.final_step.optimum;
  out.final_exponent = out.final_step.value;

  const auto final_bound = substitute(in_x, "Q", make_form({{"X", out.q_exponent}}));
  out.steps.push_back({"Q = X^{" + shiftconv::to_string(out.q_exponent) + "}", final_bound});

  Rational largest = final_bound.terms().front().exponent("X");
  for (const auto& t : final_bound.terms()) largest = std::max(largest, t.exponent("X"));
  out.confluent = largest == out.final_exponent;
  out.q_above_half = out.q_exponent > Rational(1, 2);
  out.delta_in_range = -2 * out.q_exponent <= out.delta_exponent && out.delta_exponent <= -out.q_exponent;
  return out;
}

void write_trace_text(std::ostream& out, const PipelineResult& result) {
  for (const auto& s : result.steps) out << fmt::format("{:<26} {}\n", s.description, s.bound.to_string());
  for (const auto* step : {&result.balance, &result.final_step}) {
    out << fmt::format("optimize {} against {}:\n", step->var, step->objective_var);
    for (const auto& c : step->crossings) {
      out << fmt::format("  crossing terms {} {} at {} value {}\n", c.i, c.j, shiftconv::to_string(c.at),
                         shiftconv::to_string(c.value));
    }
    out << fmt::format("  optimum {} = {}^{{{}}}, exponent {}\n", step->var, step->objective_var,
                       shiftconv::to_string(step->optimum), shiftconv::to_string(step->value));
  }
  out << fmt::format("D = Q^{{{}}}\nQ = X^{{{}}}\nDelta = X^{{{}}}\nexponent {}\n", shiftconv::to_string(result.d_exponent),
                     shiftconv::to_string(result.q_exponent), shiftconv::to_string(result.delta_exponent),
                     shiftconv::to_string(result.final_exponent));
  out << fmt::format("Q >> sqrt(X): {}\nQ^-2 <= Delta <= Q^-1: {}\n", result.q_above_half ? "yes" : "no",
                     result.delta_in_range ? "yes" : "no");
}

}  // namespace shiftconv
