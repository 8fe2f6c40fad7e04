#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfv/ghost_word.hpp"
#include "bfv/poly.hpp"
#include "bfv/vartable.hpp"

namespace bfv {

using VarTablePtr = std::shared_ptr<const VarTable>;

/// Element of the bigraded ghost algebra: a finite sum of (Poly coefficient x
/// ghost word) terms over a fixed VarTable. Zero coefficients are never
/// stored. Bidegree (p,q) = (ghost degree, ghost-momentum degree); total
/// degree p - q; resolution degree q.
class BFVElement {
 public:
  using TermMap = std::map<GhostWord, Poly>;

  BFVElement() = default;
  explicit BFVElement(VarTablePtr table) : table_(std::move(table)) {
    if (!table_) throw std::invalid_argument("BFVElement: null table");
    if (table_->fiber_count() > kMaxFiberRank)
      throw std::invalid_argument("BFVElement: fiber rank above supported maximum");
  }

  static BFVElement zero(VarTablePtr table) { return BFVElement(std::move(table)); }

  static BFVElement from_poly(VarTablePtr table, Poly p) {
    BFVElement e(std::move(table));
    e.add_term(GhostWord{}, std::move(p));
    return e;
  }

  static BFVElement unit(VarTablePtr table) {
    auto n = table->var_count();
    return from_poly(std::move(table), Poly::constant(n, Rational(1)));
  }

  static BFVElement generator(VarTablePtr table, const OddGenerator& g) {
    if (g.index >= table->fiber_count())
      throw std::out_of_range("BFVElement: ghost index out of range");
    BFVElement e(table);
    GhostWord w;
    (g.momentum ? w.momenta : w.ghosts) = 1u << g.index;
    e.add_term(w, Poly::constant(table->var_count(), Rational(1)));
    return e;
  }

  /// Section Sum_i s_i e_i from k coefficient polynomials.
  static BFVElement from_section(VarTablePtr table, const std::vector<Poly>& coeffs) {
    if (coeffs.size() != table->fiber_count())
      throw std::invalid_argument("BFVElement: section needs one coefficient per fiber variable");
    BFVElement e(table);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      GhostWord w;
      w.ghosts = 1u << i;
      e.add_term(w, coeffs[i]);
    }
    return e;
  }

  /// The tautological section: Sum_i y_i e_i.
  static BFVElement tautological(VarTablePtr table) {
    std::vector<Poly> coeffs;
    for (std::size_t i = 0; i < table->fiber_count(); ++i)
      coeffs.push_back(Poly::variable(table->var_count(), table->fiber_index(i)));
    return from_section(std::move(table), coeffs);
  }

  const VarTablePtr& table() const { return table_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const GhostWord& w, const Poly& p) {
    if (p.nvars() != table_->var_count())
      throw std::logic_error("BFVElement::add_term: coefficient arity mismatch");
    if (p.is_zero()) return;
    auto [it, inserted] = terms_.emplace(w, p);
    if (!inserted) {
      it->second += p;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Poly coefficient(const GhostWord& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Poly(table_->var_count()) : it->second;
  }

  /// Homogeneous component in bidegree (p, q).
  BFVElement component(std::uint32_t p, std::uint32_t q) const {
    BFVElement r(table_);
    for (const auto& [w, c] : terms_)
      if (w.ghost_degree() == p && w.momentum_degree() == q) r.add_term(w, c);
    return r;
  }

  /// Component of fixed total degree p - q.
  BFVElement total_degree_component(int k) const {
    BFVElement r(table_);
    for (const auto& [w, c] : terms_)
      if (w.total_degree() == k) r.add_term(w, c);
    return r;
  }

  bool is_homogeneous_total(int k) const {
    for (const auto& [w, c] : terms_)
      if (w.total_degree() != k) return false;
    return true;
  }

  /// Every term has matching ghost and momentum degree (the gauge subalgebra).
  bool is_diagonal() const {
    for (const auto& [w, c] : terms_)
      if (w.ghost_degree() != w.momentum_degree()) return false;
    return true;
  }

  std::uint32_t min_momentum_degree() const {
    std::uint32_t q = kMaxFiberRank + 1;
    for (const auto& [w, c] : terms_) q = std::min(q, w.momentum_degree());
    return q;
  }

  std::uint32_t max_momentum_degree() const {
    std::uint32_t q = 0;
    for (const auto& [w, c] : terms_) q = std::max(q, w.momentum_degree());
    return q;
  }

  BFVElement operator-() const {
    BFVElement r(table_);
    for (const auto& [w, c] : terms_) r.terms_.emplace(w, -c);
    return r;
  }

  BFVElement& operator+=(const BFVElement& o) {
    check_context(o);
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
  }
  BFVElement& operator-=(const BFVElement& o) {
    check_context(o);
    for (const auto& [w, c] : o.terms_) add_term(w, -c);
    return *this;
  }
  friend BFVElement operator+(BFVElement a, const BFVElement& b) { return a += b; }
  friend BFVElement operator-(BFVElement a, const BFVElement& b) { return a -= b; }

  friend BFVElement operator*(const Rational& c, const BFVElement& e) {
    BFVElement r(e.table_);
    for (const auto& [w, p] : e.terms_) r.add_term(w, c * p);
    return r;
  }

  friend BFVElement operator*(const Poly& f, const BFVElement& e) {
    BFVElement r(e.table_);
    for (const auto& [w, p] : e.terms_) r.add_term(w, f * p);
    return r;
  }

  /// Graded-commutative product; the Koszul sign comes from merging ghost
  /// words, coefficients are even and transparent.
  friend BFVElement operator*(const BFVElement& a, const BFVElement& b) {
    a.check_context(b);
    BFVElement r(a.table_);
    for (const auto& [wa, ca] : a.terms_) {
      for (const auto& [wb, cb] : b.terms_) {
        GhostWord w;
        int sign = word_mul(wa, wb, &w);
        if (sign == 0) continue;
        Poly p = ca * cb;
        if (sign < 0) p = -p;
        r.add_term(w, p);
      }
    }
    return r;
  }

  friend bool operator==(const BFVElement& a, const BFVElement& b) {
    return *a.table_ == *b.table_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const BFVElement& a, const BFVElement& b) { return !(a == b); }

  /// Apply a map to every coefficient (substitution, derivative, ...).
  BFVElement map_coefficients(const std::function<Poly(const Poly&)>& fn) const {
    BFVElement r(table_);
    for (const auto& [w, c] : terms_) r.add_term(w, fn(c));
    return r;
  }

  BFVElement subst_coefficients(const std::map<std::size_t, Poly>& images) const {
    return map_coefficients([&images](const Poly& p) { return p.subst(images); });
  }

  bool depends_on(std::size_t var_idx) const {
    for (const auto& [w, c] : terms_)
      if (c.depends_on(var_idx)) return true;
    return false;
  }

  void check_context(const BFVElement& o) const {
    if (table_ == o.table_) return;
    if (!table_ || !o.table_ || !(*table_ == *o.table_))
      throw std::invalid_argument("BFVElement: mismatched problem contexts");
  }

 private:
  VarTablePtr table_;
  TermMap terms_;
};

/// Pairing bracket [.,.]_G: the degree-0 graded Poisson bracket generated by
/// [e_i, eps_i]_G = 1 that annihilates coefficients. Realized as
///   [F, G] = Sum_i dR(F)/de_i * dL(G)/deps_i + dR(F)/deps_i * dL(G)/de_i
/// with right/left odd derivatives; this form is a graded biderivation
/// satisfying graded antisymmetry and Jacobi (enforced by the property suite).
inline BFVElement g_bracket(const BFVElement& a, const BFVElement& b) {
  a.check_context(b);
  const std::size_t k = a.table()->fiber_count();
  BFVElement r(a.table());
  for (const auto& [wa, ca] : a.terms()) {
    for (const auto& [wb, cb] : b.terms()) {
      for (std::uint32_t i = 0; i < k; ++i) {
        for (int pass = 0; pass < 2; ++pass) {
          OddGenerator ga{pass == 1, i};   // e_i then eps_i on the left slot
          OddGenerator gb{pass == 0, i};   // paired generator on the right slot
          GhostWord da, db;
          int sa = word_derive_right(wa, ga, &da);
          if (sa == 0) continue;
          int sb = word_derive_left(wb, gb, &db);
          if (sb == 0) continue;
          GhostWord w;
          int sm = word_mul(da, db, &w);
          if (sm == 0) continue;
          Poly p = ca * cb;
          if (sa * sb * sm < 0) p = -p;
          r.add_term(w, p);
        }
      }
    }
  }
  return r;
}

/// Canonical text form: word terms ordered by (p, q, index sets), polynomial
/// coefficients in canonical order, multi-term coefficients parenthesized.
inline std::string element_to_string(const BFVElement& e) {
  if (e.is_zero()) return "0";
  const VarTable& table = *e.table();
  std::string out;
  bool first = true;
  for (const auto& [w, c] : e.terms()) {
    std::string word = word_to_string(w);
    bool negative = false;
    std::string coeff;
    if (c.terms().size() == 1) {
      const auto& [m, r] = *c.terms().begin();
      negative = r < 0;
      Poly mag = negative ? -c : c;
      coeff = poly_to_string(mag, table);
      if (!word.empty()) {
        if (coeff == "1")
          coeff.clear();
        else
          coeff += "*";
      }
    } else {
      coeff = "(" + poly_to_string(c, table) + ")";
      if (!word.empty()) coeff += "*";
    }
    if (first) {
      if (negative) out += "-";
      first = false;
    } else {
      out += negative ? " - " : " + ";
    }
    out += coeff + word;
  }
  return out;
}

}  // namespace bfv
