#include <doctest.h>

#include <sstream>

#include "shiftconv/optimizer.hpp"

using namespace shiftconv;

namespace {

Rational r(long long p, long long q = 1) { return Rational(p, q); }

MonomialBound dstar_squared() {
  return MonomialBound({{make_form({{"D", 1}, {"Q", 1}, {"X", 1}}), "a"},
                        {make_form({{"D", r(-1, 2)}, {"Q", 2}, {"X", 1}}), "b"},
                        {make_form({{"D", r(1, 2)}, {"Q", 3}}), "c"}});
}

}  // namespace

TEST_CASE("bound construction") {
  CHECK_THROWS_AS(MonomialBound({}), std::invalid_argument);
  const MonomialBound b({{make_form({{"X", 0}, {"Q", r(1, 2)}}), ""}});
  CHECK_FALSE(b.mentions("X"));
  CHECK(b.to_string() == "Q^{1/2}");
  CHECK(to_string(LinearForm{}) == "1");
}

TEST_CASE("substitute") {
  const auto b = dstar_squared();
  const auto same = substitute(b, "D", make_form({{"D", 1}}));
  for (std::size_t i = 0; i < 3; ++i) CHECK(same.terms()[i].exponents == b.terms()[i].exponents);
  CHECK_THROWS_AS(substitute(b, "Z", make_form({{"X", 1}})), std::invalid_argument);

  const auto balanced = substitute(b, "D", make_form({{"Q", r(2, 3)}}));
  CHECK(balanced.terms()[0].exponents == balanced.terms()[1].exponents);
  CHECK(balanced.terms()[0].exponent("Q") == r(5, 3));
  CHECK(balanced.terms()[0].exponent("X") == 1);
  CHECK(balanced.terms()[2].exponent("Q") == r(10, 3));

  const auto rooted = power(balanced, r(1, 2));
  CHECK(rooted.terms()[0].exponent("Q") == r(5, 6));
  CHECK(rooted.terms()[0].exponent("X") == r(1, 2));
  CHECK(rooted.terms()[2].exponent("Q") == r(5, 3));
}

TEST_CASE("optimize single") {
  const MonomialBound sym({{make_form({{"E", 1}}), ""}, {make_form({{"E", -1}, {"X", 1}}), ""}});
  const auto res = optimize_single(sym, "E", "X");
  CHECK(res.bounded);
  CHECK(res.optimum == r(1, 2));
  CHECK(res.value == r(1, 2));
  CHECK(res.active.size() == 2);

  const MonomialBound up({{make_form({{"E", 1}}), ""}, {make_form({{"E", 2}, {"X", 1}}), ""}});
  CHECK_FALSE(optimize_single(up, "E", "X").bounded);

  const MonomialBound flat({{make_form({{"X", 2}}), ""}, {make_form({{"X", 1}}), ""}});
  const auto f = optimize_single(flat, "E", "X");
  CHECK(f.bounded);
  CHECK(f.value == 2);

  const MonomialBound mixed({{make_form({{"E", 1}, {"Y", 1}}), ""}, {make_form({{"E", -1}}), ""}});
  CHECK_THROWS_AS(optimize_single(mixed, "E", "X"), std::invalid_argument);
  CHECK_THROWS_AS(optimize_single(sym, "X", "X"), std::invalid_argument);
}

TEST_CASE("balancing the first two terms") {
  const std::size_t idx[] = {0, 1};
  const auto res = optimize_single(select(dstar_squared(), idx), "D", "Q");
  CHECK(res.optimum == r(2, 3));
  CHECK(res.value == r(5, 3));
  CHECK(res.common.at("X") == 1);
}

TEST_CASE("final optimisation over Q") {
  const MonomialBound b({{make_form({{"Q", r(5, 6)}, {"X", r(1, 2)}}), ""},
                         {make_form({{"Q", r(5, 3)}}), ""},
                         {make_form({{"X", r(3, 2)}, {"Q", -1}}), ""}});
  const auto res = optimize_single(b, "Q", "X");
  CHECK(res.optimum == r(6, 11));
  CHECK(res.value == r(21, 22));
  CHECK(res.optimum > r(1, 2));
  // confluence: substitute then read off the exponents
  const auto sub = substitute(b, "Q", make_form({{"X", res.optimum}}));
  CHECK(sub.terms()[0].exponent("X") == r(21, 22));
  CHECK(sub.terms()[1].exponent("X") == r(10, 11));
  CHECK(sub.terms()[2].exponent("X") == r(21, 22));
}

TEST_CASE("full pipeline") {
  const auto p = exponent_pipeline();
  CHECK(p.d_exponent == r(2, 3));
  CHECK(p.q_exponent == r(6, 11));
  CHECK(p.final_exponent == r(21, 22));
  CHECK(p.delta_exponent == -1);
  CHECK(p.q_above_half);
  CHECK(p.delta_in_range);
  CHECK(p.confluent);

  std::ostringstream text;
  write_trace_text(text, p);
  CHECK(text.str().find("Q = X^{6/11}") != std::string::npos);
  CHECK(text.str().find("exponent 21/22") != std::string::npos);
  const auto j = p.to_json();
  CHECK(j["exponent"] == "21/22");
  CHECK(j["D"] == "Q^{2/3}");
}
