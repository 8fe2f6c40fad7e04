#include <catch2/catch_amalgamated.hpp>

#include "../test_support.hpp"

using namespace bfv;
using bfv::testing::Rng;
using bfv::testing::make_table;

namespace {

VarTablePtr table3() { return make_table({"x1"}, {"y1", "y2"}); }

Poly P(const std::string& text, const VarTablePtr& t) { return poly_parse(text, t); }

}  // namespace

TEST_CASE("poly_parse handles the grammar") {
  auto t = table3();
  CHECK(P("0", t).is_zero());
  CHECK(P("0", t) == Poly(t->var_count()));

  Poly two_terms = P("y1*y2 - 3/2*x1^2", t);
  CHECK(two_terms.terms().size() == 2);
  Monomial m_yy(t->var_count(), 0);
  m_yy[t->fiber_index(0)] = 1;
  m_yy[t->fiber_index(1)] = 1;
  CHECK(two_terms.coefficient(m_yy) == Rational(1));
  Monomial m_xx(t->var_count(), 0);
  m_xx[0] = 2;
  CHECK(two_terms.coefficient(m_xx) == Rational(-3, 2));

  // Expansion agrees with oracle multiplication.
  CHECK(P("x1*(x1+1)", t) == P("x1", t) * (P("x1", t) + P("1", t)));
  CHECK(P("x1*(x1+1)", t) == P("x1^2+x1", t));
}

TEST_CASE("poly_parse error paths") {
  auto t = table3();
  CHECK_THROWS_AS(P("z1 + 1", t), ParseError);
  CHECK_THROWS_AS(P("x1 +* y1", t), ParseError);
  CHECK_THROWS_AS(P("x1^(2)", t), ParseError);
  CHECK_THROWS_AS(P("x1^1/2", t), ParseError);   // non-integer exponent
  CHECK_THROWS_AS(P("1/0", t), ParseError);
  CHECK_THROWS_AS(P("x1*e{1}", t), ParseError);  // ghost atom in polynomial context
}

TEST_CASE("poly_diff power rule and independence") {
  auto t = table3();
  CHECK(P("x1^2", t).diff(0) == P("2*x1", t));
  CHECK(P("x1", t).diff(t->fiber_index(0)).is_zero());
  CHECK(P("y1*y2 - 3/2*x1^2", t).diff(t->fiber_index(1)) == P("y1", t));
  CHECK_THROWS_AS(P("x1", t).diff(99), std::out_of_range);
}

TEST_CASE("poly_subst examples") {
  auto t = table3();
  const std::size_t y1 = t->fiber_index(0), y2 = t->fiber_index(1);
  // Annihilation.
  CHECK(P("y1*y2", t).subst({{y1, Poly(t->var_count())}}).is_zero());
  // Direct replacement.
  CHECK(P("y2", t).subst({{y2, P("y2 + x1", t)}}) == P("y2 + x1", t));
  // Expansion against the multiplication oracle.
  Poly shifted = P("y1", t) - P("x1", t);
  CHECK(P("y1^2", t).subst({{y1, shifted}}) == shifted * shifted);
  CHECK(P("y1^2", t).subst({{y1, shifted}}) == P("y1^2 - 2*x1*y1 + x1^2", t));
  // Identity substitution.
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    Poly p = rng.coordinate_poly(t);
    CHECK(p.subst({{y1, Poly::variable(t->var_count(), y1)}}) == p);
  }
  CHECK_THROWS_AS(P("x1", t).subst({{99, P("1", t)}}), std::out_of_range);
}

TEST_CASE("ring axioms hold exactly on randomized triples") {
  auto t = table3();
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    Poly a = rng.coordinate_poly(t), b = rng.coordinate_poly(t), c = rng.coordinate_poly(t);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a * b == b * a);
    CHECK(a + b == b + a);
    CHECK(a - a == Poly(t->var_count()));
  }
}

TEST_CASE("mixed partials commute") {
  auto t = table3();
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    Poly p = rng.coordinate_poly(t, 4, 3);
    for (std::size_t u = 0; u < 3; ++u)
      for (std::size_t v = 0; v < 3; ++v) CHECK(p.diff(u).diff(v) == p.diff(v).diff(u));
  }
}

TEST_CASE("substitution is a ring homomorphism") {
  auto t = table3();
  Rng rng(14);
  for (int i = 0; i < 40; ++i) {
    Poly p = rng.coordinate_poly(t), q = rng.coordinate_poly(t);
    std::map<std::size_t, Poly> images{{0, rng.coordinate_poly(t)},
                                       {t->fiber_index(0), rng.coordinate_poly(t)}};
    CHECK((p * q).subst(images) == p.subst(images) * q.subst(images));
    CHECK((p + q).subst(images) == p.subst(images) + q.subst(images));
  }
}

TEST_CASE("canonical serialization is stable") {
  auto t = table3();
  Rng rng(15);
  CHECK(poly_to_string(Poly(t->var_count()), *t) == "0");
  for (int i = 0; i < 50; ++i) {
    Poly p = rng.coordinate_poly(t, 5, 3);
    std::string s = poly_to_string(p, *t);
    Poly q = poly_parse(s, t);
    CHECK(q == p);
    CHECK(poly_to_string(q, *t) == s);
  }
}

TEST_CASE("degree cap is a hard error") {
  auto t = table3();
  Poly big = P("x1", t).pow(40);
  CHECK_THROWS_AS(big * big, std::runtime_error);
}

TEST_CASE("antiderivative inverts diff and vanishes at zero") {
  auto t = table3();
  const std::size_t ti = t->time_index();
  Rng rng(16);
  for (int i = 0; i < 30; ++i) {
    Poly p = rng.poly(t, 3, {0, t->fiber_index(0), ti});
    Poly F = p.antiderivative(ti);
    CHECK(F.diff(ti) == p);
    CHECK(F.subst({{ti, Poly(t->var_count())}}).is_zero());
  }
}

TEST_CASE("VarTable invariants") {
  CHECK_THROWS_AS(make_table({"x", "x"}, {"y"}), std::invalid_argument);
  CHECK_THROWS_AS(make_table({"x"}, {}), std::invalid_argument);
  CHECK_THROWS_AS(make_table({"e"}, {"y"}), std::invalid_argument);
  CHECK_THROWS_AS(make_table({"2x"}, {"y"}), std::invalid_argument);
  auto t = make_table({}, {"y1"});
  CHECK(t->base_count() == 0);
  CHECK(t->var_count() == 2);
}
