#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "bfv/element.hpp"

namespace bfv {

/// Section of E -> S: one coefficient polynomial per fiber variable, each
/// depending on base variables only.
using SectionMu = std::vector<Poly>;

inline void validate_section(const VarTable& table, const SectionMu& mu) {
  if (mu.size() != table.fiber_count())
    throw std::invalid_argument("section: expected one entry per fiber variable");
  for (const auto& p : mu) {
    if (p.nvars() != table.var_count()) throw std::logic_error("section: arity mismatch");
    for (std::size_t i = 0; i < table.fiber_count(); ++i)
      if (p.depends_on(table.fiber_index(i)))
        throw std::invalid_argument("section: entries must be free of fiber variables");
    if (table.has_time() && p.depends_on(table.time_index()))
      throw std::invalid_argument("section: entries must be free of the time variable");
  }
}

inline SectionMu negate_section(SectionMu mu) {
  for (auto& p : mu) p = -p;
  return mu;
}

inline void check_fiber_section(const BFVElement& sigma) {
  for (const auto& [w, c] : sigma.terms())
    if (w.ghost_degree() != 1 || w.momentum_degree() != 0)
      throw std::invalid_argument("expected a fiber section of pure bidegree (1,0)");
}

/// Koszul differential for the full section sigma = Omega_0 + beta_0:
/// delta[sigma](a) = [sigma, a]_G. Squares to zero for any (1,0) section.
inline BFVElement koszul_delta(const BFVElement& sigma_full, const BFVElement& a) {
  check_fiber_section(sigma_full);
  return g_bracket(sigma_full, a);
}

/// Contracting homotopy for delta[Omega_0]. On the component of fiber
/// polynomial degree m and momentum degree q it acts by
/// (m+q)^-1 Sum_i eps_i ^ d/dy_i, and vanishes when m + q = 0. The defining
/// identity h delta + delta h = id - i pr is exact and is the contract the
/// test suite enforces.
inline BFVElement koszul_homotopy(const BFVElement& a) {
  const VarTable& table = *a.table();
  const std::size_t k = table.fiber_count();
  BFVElement r(a.table());
  for (const auto& [w, c] : a.terms()) {
    const std::uint32_t q = w.momentum_degree();
    // The fiber degree is per coefficient monomial; split c accordingly.
    for (const auto& [m, coeff] : c.terms()) {
      std::uint32_t fiber_deg = 0;
      for (std::size_t i = 0; i < k; ++i) fiber_deg += m[table.fiber_index(i)];
      if (fiber_deg + q == 0) continue;
      const Rational scale = Rational(1) / Rational(fiber_deg + q);
      for (std::uint32_t i = 0; i < k; ++i) {
        const std::size_t yi = table.fiber_index(i);
        if (m[yi] == 0) continue;
        Monomial d = m;
        d[yi] -= 1;
        GhostWord eps_i;
        eps_i.momenta = 1u << i;
        GhostWord out;
        int sign = word_mul(eps_i, w, &out);
        if (sign == 0) continue;
        Rational v = scale * coeff * Rational(m[yi]);
        if (sign < 0) v = -v;
        Poly p(table.var_count());
        p.add_term(d, v);
        r.add_term(out, p);
      }
    }
  }
  return r;
}

/// pr: kill momentum-carrying terms, then restrict to the zero section.
inline BFVElement chain_pr(const BFVElement& a) {
  const VarTable& table = *a.table();
  std::map<std::size_t, Poly> zeros;
  for (std::size_t i = 0; i < table.fiber_count(); ++i)
    zeros.emplace(table.fiber_index(i), Poly(table.var_count()));
  BFVElement r(a.table());
  for (const auto& [w, c] : a.terms()) {
    if (w.momentum_degree() > 0) continue;
    r.add_term(w, c.subst(zeros));
  }
  return r;
}

/// i: extend a section of the base exterior algebra fiberwise-constantly.
/// At desk scale the embedding is the identity on admissible inputs.
inline BFVElement chain_i(const BFVElement& a) {
  const VarTable& table = *a.table();
  for (const auto& [w, c] : a.terms()) {
    if (w.momentum_degree() > 0)
      throw std::invalid_argument("chain_i: input carries ghost momenta");
    for (std::size_t i = 0; i < table.fiber_count(); ++i)
      if (c.depends_on(table.fiber_index(i)))
        throw std::invalid_argument("chain_i: input depends on fiber variables");
  }
  return a;
}

/// Fiber shift xi[mu]: (x, e) -> (x, e + mu(x)). The induced algebra
/// automorphism substitutes y_i -> y_i + mu_i in every coefficient and fixes
/// the ghost generators; it preserves [.,.]_G and maps Omega_0 to
/// Omega_0 + p*(mu).
inline BFVElement shift_automorphism(const SectionMu& mu, const BFVElement& a,
                                     bool inverse = false) {
  const VarTable& table = *a.table();
  if (mu.size() != table.fiber_count())
    throw std::invalid_argument("shift_automorphism: bad section arity");
  std::map<std::size_t, Poly> images;
  for (std::size_t i = 0; i < table.fiber_count(); ++i) {
    for (std::size_t j = 0; j < table.fiber_count(); ++j)
      if (mu[i].depends_on(table.fiber_index(j)))
        throw std::invalid_argument("shift_automorphism: section depends on fiber variables");
    const std::size_t yi = table.fiber_index(i);
    Poly img = Poly::variable(table.var_count(), yi);
    if (inverse)
      img -= mu[i];
    else
      img += mu[i];
    images.emplace(yi, std::move(img));
  }
  return a.subst_coefficients(images);
}

/// k x k matrix of coefficient polynomials, a section of End(E) pulled back
/// over the total space.
class EndomorphismField {
 public:
  EndomorphismField(VarTablePtr table, std::vector<Poly> entries)
      : table_(std::move(table)), entries_(std::move(entries)) {
    const std::size_t k = table_->fiber_count();
    if (entries_.size() != k * k)
      throw std::invalid_argument("EndomorphismField: expected k*k entries");
    for (const auto& p : entries_)
      if (p.nvars() != table_->var_count())
        throw std::logic_error("EndomorphismField: arity mismatch");
  }

  static EndomorphismField identity(VarTablePtr table) {
    const std::size_t k = table->fiber_count();
    const std::size_t n = table->var_count();
    std::vector<Poly> entries(k * k, Poly(n));
    for (std::size_t i = 0; i < k; ++i) entries[i * k + i] = Poly::constant(n, Rational(1));
    return EndomorphismField(std::move(table), std::move(entries));
  }

  const VarTablePtr& table() const { return table_; }
  std::size_t rank() const { return table_->fiber_count(); }
  const Poly& at(std::size_t i, std::size_t j) const { return entries_[i * rank() + j]; }
  Poly& at(std::size_t i, std::size_t j) { return entries_[i * rank() + j]; }

  Poly det() const { return det_minor(std::vector<std::size_t>{}, std::vector<std::size_t>{}); }

  /// Invertibility is certifiable on polynomial data only when the
  /// determinant is a nonzero constant.
  bool certified_invertible() const {
    Poly d = det();
    return d.total_degree() == 0 && !d.is_zero();
  }

  EndomorphismField inverse() const {
    Poly d = det();
    if (d.total_degree() != 0 || d.is_zero())
      throw std::invalid_argument(
          "EndomorphismField: invertibility not certifiable on polynomial data "
          "(determinant is not a nonzero constant)");
    const Rational dv = d.constant_term();
    const std::size_t k = rank();
    std::vector<Poly> inv(k * k, Poly(table_->var_count()));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        Poly c = cofactor(j, i);  // adjugate = transposed cofactors
        inv[i * k + j] = c * (Rational(1) / dv);
      }
    }
    return EndomorphismField(table_, std::move(inv));
  }

  EndomorphismField transpose() const {
    const std::size_t k = rank();
    std::vector<Poly> t(k * k, Poly(table_->var_count()));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) t[i * k + j] = at(j, i);
    return EndomorphismField(table_, std::move(t));
  }

  friend EndomorphismField operator*(const EndomorphismField& a, const EndomorphismField& b) {
    if (!(*a.table_ == *b.table_))
      throw std::invalid_argument("EndomorphismField: mismatched problem contexts");
    const std::size_t k = a.rank();
    std::vector<Poly> m(k * k, Poly(a.table_->var_count()));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t l = 0; l < k; ++l) m[i * k + j] += a.at(i, l) * b.at(l, j);
    return EndomorphismField(a.table_, std::move(m));
  }

  friend bool operator==(const EndomorphismField& a, const EndomorphismField& b) {
    return *a.table_ == *b.table_ && a.entries_ == b.entries_;
  }

  /// Matrix action on the coefficients of a (1,0) section.
  std::vector<Poly> apply(const std::vector<Poly>& s) const {
    const std::size_t k = rank();
    if (s.size() != k) throw std::invalid_argument("EndomorphismField::apply: bad arity");
    std::vector<Poly> r(k, Poly(table_->var_count()));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) r[i] += at(i, j) * s[j];
    return r;
  }

  BFVElement apply_to_section(const BFVElement& sigma) const {
    check_fiber_section(sigma);
    std::vector<Poly> s(rank(), Poly(table_->var_count()));
    for (const auto& [w, c] : sigma.terms())
      for (std::uint32_t i = 0; i < rank(); ++i)
        if (w.ghosts == (1u << i)) s[i] = c;
    return BFVElement::from_section(table_, apply(s));
  }

  EndomorphismField subst(const std::map<std::size_t, Poly>& images) const {
    std::vector<Poly> e;
    e.reserve(entries_.size());
    for (const auto& p : entries_) e.push_back(p.subst(images));
    return EndomorphismField(table_, std::move(e));
  }

 private:
  Poly cofactor(std::size_t i, std::size_t j) const {
    Poly m = det_minor({i}, {j});
    return ((i + j) % 2 == 0) ? m : -m;
  }

  Poly det_minor(std::vector<std::size_t> skip_rows, std::vector<std::size_t> skip_cols) const {
    const std::size_t k = rank();
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < k; ++i) {
      if (std::find(skip_rows.begin(), skip_rows.end(), i) == skip_rows.end()) rows.push_back(i);
      if (std::find(skip_cols.begin(), skip_cols.end(), i) == skip_cols.end()) cols.push_back(i);
    }
    return det_rec(rows, cols);
  }

  Poly det_rec(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
    if (rows.empty()) return Poly::constant(table_->var_count(), Rational(1));
    Poly acc(table_->var_count());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
      std::vector<std::size_t> sub_cols = cols;
      sub_cols.erase(sub_cols.begin() + c);
      Poly term = at(rows[0], cols[c]) * det_rec(sub_rows, sub_cols);
      if (c % 2 == 1) term = -term;
      acc += term;
    }
    return acc;
  }

  VarTablePtr table_;
  std::vector<Poly> entries_;
};

/// The algebra action of an invertible A: ghosts by A, momenta by the
/// inverse transpose, coefficients untouched. Preserves [.,.]_G and
/// intertwines delta[sigma] with delta[A sigma].
inline BFVElement endo_action(const EndomorphismField& A, const BFVElement& a) {
  if (!(*A.table() == *a.table()))
    throw std::invalid_argument("endo_action: mismatched problem contexts");
  const std::size_t k = A.rank();
  EndomorphismField invT = A.inverse().transpose();
  const VarTablePtr& table = a.table();
  std::vector<BFVElement> ghost_img, mom_img;
  for (std::size_t j = 0; j < k; ++j) {
    BFVElement ge(table), me(table);
    for (std::size_t i = 0; i < k; ++i) {
      GhostWord wg, wm;
      wg.ghosts = 1u << i;
      wm.momenta = 1u << i;
      ge.add_term(wg, A.at(i, j));
      me.add_term(wm, invT.at(i, j));
    }
    ghost_img.push_back(std::move(ge));
    mom_img.push_back(std::move(me));
  }
  BFVElement r(table);
  for (const auto& [w, c] : a.terms()) {
    BFVElement term = BFVElement::from_poly(table, c);
    for (std::uint32_t i = 0; i < k; ++i)
      if (w.ghosts & (1u << i)) term = term * ghost_img[i];
    for (std::uint32_t i = 0; i < k; ++i)
      if (w.momenta & (1u << i)) term = term * mom_img[i];
    r += term;
  }
  return r;
}

/// A (1,1) element acts on sections as an endomorphism via s -> [s, gamma]_G.
/// In matrix form M[i][j] = -coefficient of e_i eps_j; with this reading the
/// homotopy image of the full section is the identity matrix.
inline EndomorphismField endo_from_element(const BFVElement& gamma) {
  const std::size_t k = gamma.table()->fiber_count();
  const std::size_t n = gamma.table()->var_count();
  std::vector<Poly> m(k * k, Poly(n));
  for (const auto& [w, c] : gamma.terms()) {
    if (w.ghost_degree() != 1 || w.momentum_degree() != 1)
      throw std::invalid_argument("endo_from_element: expected a pure (1,1) element");
    std::uint32_t i = 0, j = 0;
    while (!(w.ghosts & (1u << i))) ++i;
    while (!(w.momenta & (1u << j))) ++j;
    m[i * k + j] = -c;
  }
  return EndomorphismField(gamma.table(), std::move(m));
}

/// A fiber section together with its geometric witness (A, mu):
/// sigma_full = Omega_0 + beta_0 = A(Omega_0 + p*(mu)). The normalized case
/// is A = id. Carries the conjugated chain maps and homotopy.
class GeometricSection {
 public:
  static GeometricSection normalized(VarTablePtr table, SectionMu mu) {
    validate_section(*table, mu);
    return GeometricSection(table, EndomorphismField::identity(table), std::move(mu));
  }

  static GeometricSection geometric(VarTablePtr table, EndomorphismField A, SectionMu mu) {
    validate_section(*table, mu);
    if (!A.certified_invertible())
      throw std::invalid_argument(
          "geometric section: witness invertibility not certifiable on polynomial data");
    return GeometricSection(std::move(table), std::move(A), std::move(mu));
  }

  const VarTablePtr& table() const { return table_; }
  const SectionMu& mu() const { return mu_; }
  const EndomorphismField& witness() const { return A_; }
  const BFVElement& sigma_full() const { return sigma_full_; }
  bool is_normalized() const { return A_ == EndomorphismField::identity(table_); }

  BFVElement delta(const BFVElement& a) const { return g_bracket(sigma_full_, a); }

  /// h[sigma] = A xi[mu] h xi[mu]^-1 A^-1; satisfies the homotopy identity
  /// with the conjugated chain maps below.
  BFVElement homotopy(const BFVElement& a) const {
    BFVElement x = endo_action(A_inv_, a);
    x = shift_automorphism(mu_, x, /*inverse=*/true);
    x = koszul_homotopy(x);
    x = shift_automorphism(mu_, x);
    return endo_action(A_, x);
  }

  BFVElement pr(const BFVElement& a) const {
    BFVElement x = endo_action(A_inv_, a);
    return chain_pr(shift_automorphism(mu_, x, /*inverse=*/true));
  }

  BFVElement i(const BFVElement& a) const {
    return endo_action(A_, shift_automorphism(mu_, chain_i(a)));
  }

 private:
  GeometricSection(VarTablePtr table, EndomorphismField A, SectionMu mu)
      : table_(std::move(table)),
        A_(std::move(A)),
        A_inv_(A_.inverse()),
        mu_(std::move(mu)),
        sigma_full_(A_.apply_to_section(BFVElement::tautological(table_) +
                                        BFVElement::from_section(table_, mu_))) {}

  VarTablePtr table_;
  EndomorphismField A_;
  EndomorphismField A_inv_;
  SectionMu mu_;
  BFVElement sigma_full_;
};

}  // namespace bfv
