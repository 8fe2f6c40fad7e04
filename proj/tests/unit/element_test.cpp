#include <catch2/catch_amalgamated.hpp>

#include "../test_support.hpp"

using namespace bfv;
using bfv::testing::Rng;
using bfv::testing::make_table;

namespace {

VarTablePtr tableK2() { return make_table({"x1"}, {"y1", "y2"}); }

BFVElement E(const std::string& text, const VarTablePtr& t) { return element_parse(text, t); }

int total_degree_of(const BFVElement& e) {
  REQUIRE(!e.is_zero());
  int d = e.terms().begin()->first.total_degree();
  REQUIRE(e.is_homogeneous_total(d));
  return d;
}

}  // namespace

TEST_CASE("graded product basics") {
  auto t = tableK2();
  Rng rng(21);
  BFVElement one = BFVElement::unit(t);
  for (int i = 0; i < 20; ++i) {
    BFVElement a = rng.element(t);
    CHECK(one * a == a);
    CHECK(a * one == a);
  }
  BFVElement e1 = E("e{1}", t), e2 = E("e{2}", t), eps1 = E("eps{1}", t);
  CHECK((e1 * e1).is_zero());
  CHECK(e1 * e2 == -(e2 * e1));
  CHECK(e1 * eps1 == -(eps1 * e1));
  CHECK(e1 * e2 == E("e{1,2}", t));
}

TEST_CASE("product is associative and graded commutative") {
  auto t = tableK2();
  Rng rng(22);
  for (int i = 0; i < 40; ++i) {
    BFVElement a = rng.element(t), b = rng.element(t), c = rng.element(t);
    CHECK((a * b) * c == a * (b * c));
  }
  for (int i = 0; i < 40; ++i) {
    // Graded commutativity on homogeneous-parity elements.
    int da = rng.uniform(-3, 3), db = rng.uniform(-3, 3);
    BFVElement a = rng.homogeneous(t, da), b = rng.homogeneous(t, db);
    if (a.is_zero() || b.is_zero()) continue;
    // Parity of a total-degree-d element is d mod 2.
    int sign = ((da % 2) && (db % 2)) ? -1 : 1;
    BFVElement rhs = b * a;
    if (sign < 0) rhs = -rhs;
    CHECK(a * b == rhs);
  }
}

TEST_CASE("g_bracket generator values") {
  auto t = tableK2();
  CHECK(g_bracket(E("e{1}", t), E("eps{1}", t)) == BFVElement::unit(t));
  CHECK(g_bracket(E("e{1}", t), E("eps{2}", t)).is_zero());
  CHECK(g_bracket(E("y1", t), E("x1", t)).is_zero());
  BFVElement omega0 = BFVElement::tautological(t);
  CHECK(omega0 == E("y1*e{1} + y2*e{2}", t));
  CHECK(g_bracket(omega0, E("eps{1}", t)) == E("y1", t));
}

TEST_CASE("g_bracket is graded antisymmetric with degree-0 bracket") {
  auto t = tableK2();
  Rng rng(23);
  int checked = 0;
  for (int i = 0; i < 120 && checked < 60; ++i) {
    BFVElement a = rng.homogeneous(t, rng.uniform(-3, 3));
    BFVElement b = rng.homogeneous(t, rng.uniform(-3, 3));
    if (a.is_zero() || b.is_zero()) continue;
    int da = total_degree_of(a), db = total_degree_of(b);
    BFVElement rhs = g_bracket(b, a);
    if (!((da % 2) && (db % 2))) rhs = -rhs;  // [a,b] = -(-1)^{|a||b|}[b,a]
    CHECK(g_bracket(a, b) == rhs);
    ++checked;
  }
  CHECK(checked >= 50);
}

TEST_CASE("g_bracket satisfies the graded Leibniz and Jacobi identities") {
  for (std::size_t k = 1; k <= 3; ++k) {
    std::vector<std::string> fiber;
    for (std::size_t i = 1; i <= k; ++i) fiber.push_back("y" + std::to_string(i));
    auto t = make_table({"x1"}, fiber);
    Rng rng(static_cast<std::uint32_t>(24 + k));
    int checked = 0;
    for (int i = 0; i < 200 && checked < 40; ++i) {
      BFVElement a = rng.homogeneous(t, rng.uniform(-3, 3), 2);
      BFVElement b = rng.homogeneous(t, rng.uniform(-3, 3), 2);
      BFVElement c = rng.element(t, 2);
      if (a.is_zero() || b.is_zero()) continue;
      int da = total_degree_of(a), db = total_degree_of(b);
      bool sign = (da % 2) && (db % 2);
      // Leibniz: [a, b*c] = [a,b]*c + (-1)^{|a||b|} b*[a,c].
      BFVElement leibniz = g_bracket(a, b) * c + (sign ? -(b * g_bracket(a, c))
                                                       : b * g_bracket(a, c));
      CHECK(g_bracket(a, b * c) == leibniz);
      // Jacobi in derivation form: [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|}[b,[a,c]].
      BFVElement jacobi = g_bracket(g_bracket(a, b), c) +
                          (sign ? -g_bracket(b, g_bracket(a, c))
                                : g_bracket(b, g_bracket(a, c)));
      CHECK(g_bracket(a, g_bracket(b, c)) == jacobi);
      ++checked;
    }
    CHECK(checked >= 30);
  }
}

TEST_CASE("element serialization round-trips") {
  auto t = tableK2();
  CHECK(element_to_string(BFVElement::zero(t)) == "0");
  CHECK(element_to_string(BFVElement::tautological(t)) == "y1*e{1} + y2*e{2}");
  Rng rng(26);
  for (int i = 0; i < 60; ++i) {
    BFVElement a = rng.element(t, 5);
    std::string s = element_to_string(a);
    BFVElement b = element_parse(s, t);
    CHECK(b == a);
    CHECK(element_to_string(b) == s);
  }
}

TEST_CASE("context mismatch is rejected") {
  auto t1 = tableK2();
  auto t2 = make_table({"u"}, {"y1", "y2"});
  CHECK_THROWS_AS(E("e{1}", t1) * E("e{1}", t2), std::invalid_argument);
  CHECK_THROWS_AS(g_bracket(E("e{1}", t1), E("eps{1}", t2)), std::invalid_argument);
}

TEST_CASE("bidegree bookkeeping") {
  auto t = tableK2();
  BFVElement a = E("x1*e{1} + y1*e{1,2}*eps{2} + eps{1}", t);
  CHECK(a.component(1, 0) == E("x1*e{1}", t));
  CHECK(a.component(2, 1) == E("y1*e{1,2}*eps{2}", t));
  CHECK(a.component(0, 1) == E("eps{1}", t));
  CHECK(a.total_degree_component(1) == E("x1*e{1} + y1*e{1,2}*eps{2}", t));
  CHECK(a.total_degree_component(-1) == E("eps{1}", t));
  CHECK(!a.is_homogeneous_total(1));
  CHECK(E("x1*e{1}*eps{1} + e{2}*eps{2}", t).is_diagonal());
  CHECK(!a.is_diagonal());
  CHECK(a.min_momentum_degree() == 0);
  CHECK(a.max_momentum_degree() == 1);
}
