#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfv/rational.hpp"
#include "bfv/vartable.hpp"

namespace bfv {

/// Exponent vector, one entry per variable of the owning VarTable.
using Monomial = std::vector<std::uint32_t>;

/// Runaway-growth guard. Exceeding the cap is a hard error, never a silent
/// truncation.
constexpr std::uint32_t kMaxTotalDegree = 64;

inline std::uint32_t monomial_degree(const Monomial& m) {
  std::uint32_t d = 0;
  for (auto e : m) d += e;
  return d;
}

/// Graded lexicographic order: lower total degree first, ties broken
/// lexicographically in the variable order of the table.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    std::uint32_t da = monomial_degree(a), db = monomial_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

/// Sparse multivariate polynomial with exact rational coefficients.
/// Invariant: no zero coefficients are stored. Immutable in spirit: all
/// operations return fresh values.
class Poly {
 public:
  using TermMap = std::map<Monomial, Rational, GrlexLess>;

  Poly() : nvars_(0) {}
  explicit Poly(std::size_t nvars) : nvars_(nvars) {}

  static Poly constant(std::size_t nvars, Rational c) {
    Poly p(nvars);
    if (!bfv::is_zero(c)) p.terms_.emplace(Monomial(nvars, 0), std::move(c));
    return p;
  }

  static Poly variable(std::size_t nvars, std::size_t idx) {
    if (idx >= nvars) throw std::out_of_range("Poly::variable: index out of range");
    Poly p(nvars);
    Monomial m(nvars, 0);
    m[idx] = 1;
    p.terms_.emplace(std::move(m), Rational(1));
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  std::uint32_t total_degree() const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, monomial_degree(m));
    return d;
  }

  std::uint32_t degree_in(std::size_t idx) const {
    std::uint32_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[idx]);
    return d;
  }

  bool depends_on(std::size_t idx) const {
    for (const auto& [m, c] : terms_)
      if (m[idx] > 0) return true;
    return false;
  }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// Constant term; equals the whole polynomial iff total_degree() == 0.
  Rational constant_term() const { return coefficient(Monomial(nvars_, 0)); }

  void add_term(const Monomial& m, const Rational& c) {
    if (m.size() != nvars_) throw std::logic_error("Poly::add_term: arity mismatch");
    if (bfv::is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (bfv::is_zero(it->second)) terms_.erase(it);
    }
  }

  Poly operator-() const {
    Poly r(nvars_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }

  Poly& operator+=(const Poly& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_same(b);
    Poly r(a.nvars_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m(a.nvars_);
        std::uint32_t deg = 0;
        for (std::size_t i = 0; i < a.nvars_; ++i) {
          m[i] = ma[i] + mb[i];
          deg += m[i];
        }
        if (deg > kMaxTotalDegree)
          throw std::runtime_error("Poly: total degree cap (64) exceeded");
        r.add_term(m, ca * cb);
      }
    }
    return r;
  }

  friend Poly operator*(const Rational& c, const Poly& p) {
    Poly r(p.nvars_);
    if (bfv::is_zero(c)) return r;
    for (const auto& [m, pc] : p.terms_) r.terms_.emplace(m, c * pc);
    return r;
  }
  friend Poly operator*(const Poly& p, const Rational& c) { return c * p; }

  Poly pow(std::uint32_t e) const {
    Poly r = constant(nvars_, Rational(1));
    for (std::uint32_t i = 0; i < e; ++i) r = r * (*this);
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// Formal partial derivative with respect to variable idx.
  Poly diff(std::size_t idx) const {
    if (idx >= nvars_) throw std::out_of_range("Poly::diff: variable index out of range");
    Poly r(nvars_);
    for (const auto& [m, c] : terms_) {
      if (m[idx] == 0) continue;
      Monomial d = m;
      d[idx] -= 1;
      r.add_term(d, c * Rational(m[idx]));
    }
    return r;
  }

  /// Antiderivative in variable idx, normalized to vanish at idx = 0.
  Poly antiderivative(std::size_t idx) const {
    if (idx >= nvars_) throw std::out_of_range("Poly::antiderivative: index out of range");
    Poly r(nvars_);
    for (const auto& [m, c] : terms_) {
      Monomial d = m;
      d[idx] += 1;
      if (monomial_degree(d) > kMaxTotalDegree)
        throw std::runtime_error("Poly: total degree cap (64) exceeded");
      r.add_term(d, c / Rational(d[idx]));
    }
    return r;
  }

  /// Simultaneous substitution. Unmapped variables stay themselves.
  Poly subst(const std::map<std::size_t, Poly>& images) const {
    for (const auto& [idx, img] : images) {
      if (idx >= nvars_) throw std::out_of_range("Poly::subst: variable index out of range");
      if (img.nvars() != nvars_) throw std::logic_error("Poly::subst: arity mismatch");
    }
    Poly r(nvars_);
    for (const auto& [m, c] : terms_) {
      Poly term = constant(nvars_, c);
      Monomial untouched(nvars_, 0);
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (m[i] == 0) continue;
        auto it = images.find(i);
        if (it == images.end())
          untouched[i] = m[i];
        else
          term = term * it->second.pow(m[i]);
      }
      if (monomial_degree(untouched) > 0) {
        Poly u(nvars_);
        u.terms_.emplace(std::move(untouched), Rational(1));
        term = term * u;
      }
      r += term;
    }
    return r;
  }

  /// Numeric evaluation; the entry point of the quarantined floating lane.
  double eval(const std::vector<double>& point) const {
    if (point.size() != nvars_) throw std::logic_error("Poly::eval: arity mismatch");
    double acc = 0.0;
    for (const auto& [m, c] : terms_) {
      double t = to_double(c);
      for (std::size_t i = 0; i < nvars_; ++i)
        for (std::uint32_t e = 0; e < m[i]; ++e) t *= point[i];
      acc += t;
    }
    return acc;
  }

  Rational eval_rational(const std::vector<Rational>& point) const {
    if (point.size() != nvars_) throw std::logic_error("Poly::eval_rational: arity mismatch");
    Rational acc(0);
    for (const auto& [m, c] : terms_) {
      Rational t = c;
      for (std::size_t i = 0; i < nvars_; ++i)
        for (std::uint32_t e = 0; e < m[i]; ++e) t *= point[i];
      acc += t;
    }
    return acc;
  }

 private:
  void check_same(const Poly& o) const {
    if (nvars_ != o.nvars_) throw std::logic_error("Poly: mixed variable tables");
  }

  std::size_t nvars_;
  TermMap terms_;
};

/// Canonical text form: terms in descending graded-lex order, rationals in
/// lowest terms, unit coefficients elided, '^' only for exponents above 1.
inline std::string poly_to_string(const Poly& p, const VarTable& table) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    const bool negative = c < 0;
    if (first) {
      if (negative) out += "-";
      first = false;
    } else {
      out += negative ? " - " : " + ";
    }
    Rational mag = negative ? Rational(-c) : c;
    std::string vars;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!vars.empty()) vars += "*";
      vars += table.name(i);
      if (m[i] > 1) vars += "^" + std::to_string(m[i]);
    }
    if (vars.empty()) {
      out += rational_str(mag);
    } else {
      if (mag != 1) out += rational_str(mag) + "*";
      out += vars;
    }
  }
  return out;
}

}  // namespace bfv
