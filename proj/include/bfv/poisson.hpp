#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bfv/koszul.hpp"
#include "bfv/poly.hpp"
#include "bfv/vartable.hpp"

namespace bfv {

/// First nonzero component of the Schouten jacobiator, 1-based coordinates.
struct JacobiWitness {
  std::size_t a, b, c;
  Poly component;
};

/// Offending generator pair of a failed coisotropy test, 1-based fiber
/// indices, with the bracket restricted to the graph.
struct CoisotropyWitness {
  std::size_t i, j;
  Poly restricted;
};

/// Antisymmetric bivector over the n+k coordinates (time is a parameter, not
/// a coordinate). Strictly upper-triangular storage; the lower triangle and
/// the diagonal are implied.
class PoissonBivector {
 public:
  explicit PoissonBivector(VarTablePtr table)
      : table_(std::move(table)),
        coords_(table_->base_count() + table_->fiber_count()),
        upper_(coords_ * coords_, Poly(table_->var_count())) {}

  const VarTablePtr& table() const { return table_; }
  std::size_t coord_count() const { return coords_; }

  /// Set Pi^{ab}; accepts either orientation of the pair.
  void set_entry(std::size_t a, std::size_t b, const Poly& p) {
    if (a >= coords_ || b >= coords_)
      throw std::out_of_range("PoissonBivector: coordinate index out of range");
    if (a == b) throw std::invalid_argument("PoissonBivector: diagonal entries are zero");
    if (p.nvars() != table_->var_count())
      throw std::logic_error("PoissonBivector: arity mismatch");
    if (table_->has_time() && p.depends_on(table_->time_index()))
      throw std::invalid_argument("PoissonBivector: entries must be time-independent");
    if (a < b)
      upper_[a * coords_ + b] = p;
    else
      upper_[b * coords_ + a] = -p;
  }

  /// Pi^{ab} with the antisymmetry filled in.
  Poly entry(std::size_t a, std::size_t b) const {
    if (a >= coords_ || b >= coords_)
      throw std::out_of_range("PoissonBivector: coordinate index out of range");
    if (a == b) return Poly(table_->var_count());
    if (a < b) return upper_[a * coords_ + b];
    return -upper_[b * coords_ + a];
  }

  bool is_zero() const {
    for (const auto& p : upper_)
      if (!p.is_zero()) return false;
    return true;
  }

  /// {f,g} = Sum_{a<b} Pi^{ab} (d_a f d_b g - d_b f d_a g).
  Poly bracket(const Poly& f, const Poly& g) const {
    Poly acc(table_->var_count());
    for (std::size_t a = 0; a < coords_; ++a) {
      for (std::size_t b = a + 1; b < coords_; ++b) {
        const Poly& pab = upper_[a * coords_ + b];
        if (pab.is_zero()) continue;
        acc += pab * (f.diff(a) * g.diff(b) - f.diff(b) * g.diff(a));
      }
    }
    return acc;
  }

  friend bool operator==(const PoissonBivector& x, const PoissonBivector& y) {
    return *x.table_ == *y.table_ && x.upper_ == y.upper_;
  }

 private:
  VarTablePtr table_;
  std::size_t coords_;
  std::vector<Poly> upper_;  // row-major, used for a < b only
};

/// Componentwise Schouten jacobiator
///   J^{abc} = Sum_cyclic(a,b,c) Sum_d Pi^{ad} d_d Pi^{bc};
/// returns the first nonzero component, or nullopt when the Jacobi identity
/// holds exactly.
inline std::optional<JacobiWitness> check_jacobi(const PoissonBivector& pi) {
  const std::size_t N = pi.coord_count();
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) {
      for (std::size_t c = b + 1; c < N; ++c) {
        Poly J(pi.table()->var_count());
        const std::size_t idx[3] = {a, b, c};
        for (int r = 0; r < 3; ++r) {
          const std::size_t u = idx[r], v = idx[(r + 1) % 3], w = idx[(r + 2) % 3];
          for (std::size_t d = 0; d < N; ++d) J += pi.entry(u, d) * pi.entry(v, w).diff(d);
        }
        if (!J.is_zero()) return JacobiWitness{a + 1, b + 1, c + 1, J};
      }
    }
  }
  return std::nullopt;
}

/// Decide coisotropy of the graph of nu by the vanishing-ideal criterion.
/// The graph ideal has the triangular generators g_i = y_i - nu_i(x), so the
/// test reduces to substituting the graph into {g_i, g_j}.
inline std::optional<CoisotropyWitness> check_coisotropic_section(const PoissonBivector& pi,
                                                                  const SectionMu& nu) {
  const VarTable& table = *pi.table();
  validate_section(table, nu);
  const std::size_t k = table.fiber_count();
  const std::size_t nv = table.var_count();
  std::vector<Poly> gens;
  gens.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    gens.push_back(Poly::variable(nv, table.fiber_index(i)) - nu[i]);
  std::map<std::size_t, Poly> graph;
  for (std::size_t i = 0; i < k; ++i) graph.emplace(table.fiber_index(i), nu[i]);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      Poly restricted = pi.bracket(gens[i], gens[j]).subst(graph);
      if (!restricted.is_zero()) return CoisotropyWitness{i + 1, j + 1, restricted};
    }
  }
  return std::nullopt;
}

/// Components of a vector field in the coordinate frame.
using VectorField = std::vector<Poly>;

/// X_f with the ledger convention X_f(g) = {f,g}: component a is
/// Sum_b d_b f Pi^{ba}.
inline VectorField hamiltonian_vector_field(const PoissonBivector& pi, const Poly& f) {
  const std::size_t N = pi.coord_count();
  VectorField X(N, Poly(pi.table()->var_count()));
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) {
      Poly pba = pi.entry(b, a);
      if (!pba.is_zero()) X[a] += f.diff(b) * pba;
    }
  return X;
}

}  // namespace bfv
