#pragma once

#include <random>
#include <string>
#include <vector>

#include "bfv/bfv.hpp"

namespace bfv::testing {

/// Deterministic random data for property tests. Seeds are fixed per suite.
class Rng {
 public:
  explicit Rng(std::uint32_t seed) : eng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  Rational rational() {
    int num = uniform(-9, 9);
    int den = uniform(1, 4);
    return Rational(num, den);
  }

  Rational nonzero_rational() {
    Rational r = rational();
    return r.is_zero() ? Rational(1) : r;
  }

  /// Random polynomial; var_mask limits which variables may appear.
  Poly poly(const VarTablePtr& table, int max_terms, const std::vector<std::size_t>& vars,
            int max_exp = 2) {
    Poly p(table->var_count());
    const int terms = uniform(1, max_terms);
    for (int i = 0; i < terms; ++i) {
      Monomial m(table->var_count(), 0);
      for (std::size_t v : vars) m[v] = static_cast<std::uint32_t>(uniform(0, max_exp));
      p.add_term(m, rational());
    }
    return p;
  }

  std::vector<std::size_t> coordinate_vars(const VarTablePtr& table) {
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < table->base_count() + table->fiber_count(); ++i)
      vars.push_back(i);
    return vars;
  }

  std::vector<std::size_t> base_vars(const VarTablePtr& table) {
    std::vector<std::size_t> vars;
    for (std::size_t i = 0; i < table->base_count(); ++i) vars.push_back(i);
    return vars;
  }

  Poly coordinate_poly(const VarTablePtr& table, int max_terms = 3, int max_exp = 2) {
    return poly(table, max_terms, coordinate_vars(table), max_exp);
  }

  GhostWord word(std::size_t k) {
    GhostWord w;
    w.ghosts = static_cast<std::uint32_t>(uniform(0, (1 << k) - 1));
    w.momenta = static_cast<std::uint32_t>(uniform(0, (1 << k) - 1));
    return w;
  }

  BFVElement element(const VarTablePtr& table, int max_terms = 4) {
    BFVElement e(table);
    const int terms = uniform(1, max_terms);
    for (int i = 0; i < terms; ++i)
      e.add_term(word(table->fiber_count()), coordinate_poly(table));
    return e;
  }

  /// Homogeneous element of fixed total degree.
  BFVElement homogeneous(const VarTablePtr& table, int degree, int max_terms = 3) {
    const std::size_t k = table->fiber_count();
    BFVElement e(table);
    for (int attempts = 0; attempts < 200 && e.is_zero(); ++attempts) {
      const int terms = uniform(1, max_terms);
      for (int i = 0; i < terms; ++i) {
        for (int tries = 0; tries < 400; ++tries) {
          GhostWord w = word(k);
          if (w.total_degree() == degree) {
            e.add_term(w, coordinate_poly(table));
            break;
          }
        }
      }
    }
    return e;
  }

  /// Random bidegree (1,0) section, optionally fiber-dependent.
  BFVElement fiber_section(const VarTablePtr& table, bool base_only) {
    const std::size_t k = table->fiber_count();
    std::vector<Poly> coeffs;
    auto vars = base_only ? this->base_vars(table) : coordinate_vars(table);
    for (std::size_t i = 0; i < k; ++i) coeffs.push_back(poly(table, 2, vars));
    return BFVElement::from_section(table, coeffs);
  }

 private:
  std::mt19937 eng_;
};

inline VarTablePtr make_table(std::vector<std::string> base, std::vector<std::string> fiber,
                              bool with_time = true) {
  return std::make_shared<VarTable>(std::move(base), std::move(fiber),
                                    with_time ? std::optional<std::string>{"t"} : std::nullopt);
}

/// One corpus entry: a Jacobi-valid bivector plus known facts about it.
struct CorpusEntry {
  std::string name;
  VarTablePtr table;
  PoissonBivector pi;
  bool coisotropic_zero;
  std::vector<SectionMu> coisotropic_sections;  // sections mu with -mu coisotropic
};

/// Desk-scale corpus: six bivectors with coisotropic zero section (including
/// the y1-central example) and six without (including the constant
/// obstruction example).
inline std::vector<CorpusEntry> build_corpus() {
  std::vector<CorpusEntry> corpus;
  auto add = [&corpus](std::string name, VarTablePtr table,
                       std::vector<std::tuple<int, int, std::string>> entries,
                       bool coisotropic_zero, std::vector<std::vector<std::string>> sections) {
    PoissonBivector pi(table);
    for (auto& [a, b, text] : entries) pi.set_entry(a, b, poly_parse(text, table));
    CorpusEntry e{std::move(name), table, std::move(pi), coisotropic_zero, {}};
    for (auto& sec : sections) {
      SectionMu mu;
      for (auto& s : sec) mu.push_back(poly_parse(s, table));
      e.coisotropic_sections.push_back(std::move(mu));
    }
    corpus.push_back(std::move(e));
  };

  // --- zero section coisotropic ---
  add("zero-bivector", make_table({"x1"}, {"y1", "y2"}), {}, true,
      {{"x1^2", "1/2*x1"}});
  add("exA-constant-symplectic", make_table({"x"}, {"y"}), {{0, 1, "1"}}, true,
      {{"x^2"}, {"3*x + 1"}, {"x^3 - 1/2*x"}});
  add("exB-y1-central", make_table({"x1"}, {"y1", "y2"}), {{1, 2, "y1"}}, true,
      {{"0", "x1"}, {"0", "x1^2"}, {"0", "5*x1 - 2"}});
  add("so3-fiber", make_table({}, {"y1", "y2", "y3"}),
      {{0, 1, "y3"}, {1, 2, "y1"}, {0, 2, "-y2"}}, true, {{"0", "0", "0"}});
  add("two-block", make_table({"x1", "x2"}, {"y1", "y2"}), {{0, 1, "1"}, {2, 3, "y2"}}, true,
      {{"x1", "0"}, {"x2^2", "0"}});
  add("xy-mixing", make_table({"x"}, {"y"}), {{0, 1, "y"}}, true, {{"3*x + 1"}, {"x^2"}});
  // Cubic entries force two genuine perturbation steps in both the charge and
  // the normalized lift.
  add("cubic-k3", make_table({"x1"}, {"y1", "y2", "y3"}),
      {{1, 3, "2*x1*y1*y3"}, {2, 3, "-3*x1*y2*y3"}}, true, {{"x1", "x1^2", "0"}});

  // --- zero section not coisotropic ---
  add("exC-constant-obstruction", make_table({"x1"}, {"y1", "y2"}), {{1, 2, "x1"}}, false, {});
  add("fiber-symplectic", make_table({}, {"y1", "y2"}), {{0, 1, "1"}}, false, {});
  add("affine-y1", make_table({"x1"}, {"y1", "y2"}), {{1, 2, "y1 + 1"}}, false, {});
  add("x-dependent-obstruction", make_table({"x1"}, {"y1", "y2"}), {{1, 2, "1 + x1^2"}}, false,
      {});
  add("so3-shifted", make_table({}, {"y1", "y2", "y3"}),
      {{0, 1, "y3 + 1"}, {1, 2, "y1"}, {0, 2, "-y2"}}, false, {});
  add("mixed-constant", make_table({"x1"}, {"y1", "y2"}), {{0, 1, "1"}, {1, 2, "1"}}, false, {});

  return corpus;
}

}  // namespace bfv::testing
