#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bfv/bracket.hpp"
#include "bfv/charge.hpp"

namespace bfv {

struct NotLocallyNilpotent : std::runtime_error {
  NotLocallyNilpotent()
      : std::runtime_error(
            "generator not locally nilpotent on this input; integration outside the "
            "polynomial ring") {}
};

constexpr int kDefaultNilCap = 64;

/// Infinitesimal gauge generator: total degree 0 with only diagonal
/// bidegrees (m,m), coefficients polynomial in (x, y, t).
class GaugeGenerator {
 public:
  explicit GaugeGenerator(BFVElement gamma) : gamma_(std::move(gamma)) {
    if (!gamma_.is_diagonal())
      throw std::invalid_argument(
          "GaugeGenerator: element must have diagonal bidegree (m,m) only");
    r_min_ = gamma_.min_momentum_degree();  // k+1 sentinel for the zero generator
  }

  const BFVElement& element() const { return gamma_; }
  std::uint32_t r_min() const { return r_min_; }

  /// The (0,0) component F(x,y,t); vanishes identically when r_min >= 1.
  Poly project() const { return gamma_.coefficient(GhostWord{}); }

  /// gamma'(t) = -gamma(1-t), the generator of the inverse flow.
  GaugeGenerator time_reversed() const {
    const VarTable& table = *gamma_.table();
    if (!table.has_time())
      throw std::logic_error("GaugeGenerator: time reversal needs a time variable");
    const std::size_t nv = table.var_count();
    std::map<std::size_t, Poly> flip{
        {table.time_index(),
         Poly::constant(nv, Rational(1)) - Poly::variable(nv, table.time_index())}};
    return GaugeGenerator(-gamma_.subst_coefficients(flip));
  }

 private:
  BFVElement gamma_;
  std::uint32_t r_min_;
};

/// All algebra generators of the problem, in report order.
inline std::vector<std::pair<std::string, BFVElement>> algebra_generators(
    const VarTablePtr& table) {
  std::vector<std::pair<std::string, BFVElement>> gens;
  const std::size_t coords = table->base_count() + table->fiber_count();
  for (std::size_t i = 0; i < coords; ++i)
    gens.emplace_back(table->name(i),
                      BFVElement::from_poly(table, Poly::variable(table->var_count(), i)));
  for (std::size_t i = 0; i < table->fiber_count(); ++i) {
    gens.emplace_back("e{" + std::to_string(i + 1) + "}",
                      BFVElement::generator(table, OddGenerator{false, static_cast<std::uint32_t>(i)}));
    gens.emplace_back("eps{" + std::to_string(i + 1) + "}",
                      BFVElement::generator(table, OddGenerator{true, static_cast<std::uint32_t>(i)}));
  }
  return gens;
}

/// One-parameter family of algebra automorphisms, represented by the images
/// of the algebra generators with polynomial-in-t coefficients. Solves
/// d/dt psi_t(g) = -[gamma_t, psi_t(g)]_BFV with psi_0 = id.
class MorphismFamily {
 public:
  MorphismFamily(VarTablePtr table, BFVElement generator, std::vector<BFVElement> images,
                 int dyson_depth, std::uint32_t r_min)
      : table_(std::move(table)),
        generator_(std::move(generator)),
        images_(std::move(images)),
        dyson_depth_(dyson_depth),
        r_min_(r_min) {}

  static MorphismFamily identity(const VarTablePtr& table) {
    std::vector<BFVElement> images;
    for (auto& [name, g] : algebra_generators(table)) images.push_back(g);
    return MorphismFamily(table, BFVElement::zero(table), std::move(images), 0,
                          kMaxFiberRank + 1);
  }

  const VarTablePtr& table() const { return table_; }
  const BFVElement& generator() const { return generator_; }
  int dyson_depth() const { return dyson_depth_; }
  std::uint32_t r_min() const { return r_min_; }

  const BFVElement& image(std::size_t flat_index) const { return images_.at(flat_index); }
  const BFVElement& coordinate_image(std::size_t idx) const { return images_.at(idx); }
  const BFVElement& ghost_image(std::size_t i) const {
    return images_.at(table_->base_count() + table_->fiber_count() + 2 * i);
  }
  const BFVElement& momentum_image(std::size_t i) const {
    return images_.at(table_->base_count() + table_->fiber_count() + 2 * i + 1);
  }

  /// Apply the morphism symbolically (images keep their t dependence).
  BFVElement apply(const BFVElement& a) const {
    if (!(*a.table() == *table_))
      throw std::invalid_argument("MorphismFamily: mismatched problem contexts");
    const VarTable& table = *table_;
    const std::size_t coords = table.base_count() + table.fiber_count();
    BFVElement r(table_);
    for (const auto& [w, c] : a.terms()) {
      for (const auto& [m, coeff] : c.terms()) {
        Poly scalar(table.var_count());
        Monomial passthrough(table.var_count(), 0);
        if (table.has_time()) passthrough[table.time_index()] = m[table.time_index()];
        scalar.add_term(passthrough, coeff);
        BFVElement term = BFVElement::from_poly(table_, scalar);
        for (std::size_t i = 0; i < coords; ++i)
          for (std::uint32_t e = 0; e < m[i]; ++e) term = term * coordinate_image(i);
        for (std::uint32_t i = 0; i < table.fiber_count(); ++i)
          if (w.ghosts & (1u << i)) term = term * ghost_image(i);
        for (std::uint32_t i = 0; i < table.fiber_count(); ++i)
          if (w.momenta & (1u << i)) term = term * momentum_image(i);
        r += term;
      }
    }
    return r;
  }

  BFVElement apply_at(const BFVElement& a, const Rational& t) const {
    return at_time(apply(a), t);
  }

  BFVElement at_time(const BFVElement& a, const Rational& t) const {
    const VarTable& table = *table_;
    if (!table.has_time()) return a;
    std::map<std::size_t, Poly> sub{
        {table.time_index(), Poly::constant(table.var_count(), t)}};
    return a.subst_coefficients(sub);
  }

  /// Linear action on the ghost frame: entry (i,j) is the e_i coefficient of
  /// the (1,0) part of psi(e_j), evaluated at time t.
  EndomorphismField ghost_block_at(const Rational& t) const {
    const std::size_t k = table_->fiber_count();
    std::vector<Poly> entries(k * k, Poly(table_->var_count()));
    for (std::size_t j = 0; j < k; ++j) {
      BFVElement img = at_time(ghost_image(j).component(1, 0), t);
      for (const auto& [w, c] : img.terms()) {
        std::uint32_t i = 0;
        while (!(w.ghosts & (1u << i))) ++i;
        entries[i * k + j] = c;
      }
    }
    return EndomorphismField(table_, std::move(entries));
  }

  /// Flow-equation residual d/dt psi_t(g) + [gamma_t, psi_t(g)]_BFV for the
  /// image of one generator; identically zero for a correct integration.
  BFVElement ode_residual(const PoissonBivector& pi, std::size_t flat_index) const {
    const std::size_t t_idx = table_->time_index();
    BFVElement img = images_.at(flat_index);
    BFVElement ddt = img.map_coefficients([t_idx](const Poly& p) { return p.diff(t_idx); });
    return ddt + bfv_bracket(pi, generator_, img);
  }

  std::size_t image_count() const { return images_.size(); }

 private:
  VarTablePtr table_;
  BFVElement generator_;
  std::vector<BFVElement> images_;
  int dyson_depth_;
  std::uint32_t r_min_;
};

/// Integrate a gauge generator to its morphism family via the time-ordered
/// exponential: per generator g, iterate
///   T_0 = g,  T_{n+1}(t) = int_0^t -[gamma_s, T_n(s)] ds
/// until the term vanishes; the partial sums stay in the polynomial ring.
/// Locally nilpotent generators terminate within nil_cap steps; anything
/// else is rejected.
inline MorphismFamily integrate_generator(const PoissonBivector& pi, const GaugeGenerator& gen,
                                          int nil_cap = kDefaultNilCap) {
  const VarTablePtr& table = pi.table();
  if (!table->has_time())
    throw std::logic_error("integrate_generator: problem context has no time variable");
  const std::size_t t_idx = table->time_index();
  const BFVElement& gamma = gen.element();

  std::vector<BFVElement> images;
  int depth = 0;
  for (const auto& [name, g] : algebra_generators(table)) {
    BFVElement term = g;
    BFVElement sum = g;
    int n = 0;
    for (;;) {
      BFVElement integrand = -bfv_bracket(pi, gamma, term);
      BFVElement next = integrand.map_coefficients(
          [t_idx](const Poly& p) { return p.antiderivative(t_idx); });
      if (next.is_zero()) break;
      if (++n > nil_cap) throw NotLocallyNilpotent();
      sum += next;
      term = std::move(next);
    }
    depth = std::max(depth, n);
    images.push_back(std::move(sum));
  }
  return MorphismFamily(table, gamma, std::move(images), depth, gen.r_min());
}

/// psi . beta := psi(Omega + beta) - Omega, checked along the whole path:
/// the Maurer-Cartan residual of psi_t(Omega + beta) must vanish as a
/// polynomial identity in t. Pure flows transport the geometric witness by
/// composing with the ghost block at t = 1.
inline MCElement gauge_act(const PoissonBivector& pi, const BFVElement& omega,
                           const MorphismFamily& psi, const MCElement& mc) {
  BFVElement total_path = psi.apply(omega + mc.beta);
  BFVElement residual = bfv_bracket(pi, total_path, total_path);
  if (!residual.is_zero())
    throw std::runtime_error(
        "gauge_act: result violates the Maurer-Cartan equation (integration bug)");
  MCElement out;
  out.beta = psi.at_time(total_path, Rational(1)) - omega;
  if (mc.witness && psi.r_min() >= 1) {
    EndomorphismField block = psi.ghost_block_at(Rational(1));
    out.witness = GeometricWitness{block * mc.witness->A, mc.witness->mu};
  }
  return out;
}

/// pi(gamma): the (0,0) component, generating the shadow Hamiltonian flow.
inline Poly project_generator(const GaugeGenerator& gen) { return gen.project(); }

struct HomotopySegment {
  GaugeGenerator generator;
  MorphismFamily family;
};

/// Piecewise gauge homotopy: an ordered list of integrated segments together
/// with the Maurer-Cartan elements at both ends. Every intermediate element
/// passes mc_check by construction.
struct GaugeHomotopy {
  MCElement start;
  std::vector<HomotopySegment> segments;
  MCElement end;
};

inline GaugeHomotopy make_gauge_homotopy(const PoissonBivector& pi, const BFVElement& omega,
                                         MCElement start,
                                         const std::vector<GaugeGenerator>& generators,
                                         int nil_cap = kDefaultNilCap) {
  GaugeHomotopy h;
  h.start = start;
  MCElement current = std::move(start);
  for (const auto& gen : generators) {
    MorphismFamily family = integrate_generator(pi, gen, nil_cap);
    MCElement next = gauge_act(pi, omega, family, current);
    h.segments.push_back(HomotopySegment{gen, std::move(family)});
    current = std::move(next);
  }
  h.end = std::move(current);
  return h;
}

/// Pure iff every segment generator lies in resolution degree >= 1.
inline bool is_pure(const GaugeHomotopy& h) {
  for (const auto& seg : h.segments)
    if (seg.generator.r_min() < 1) return false;
  return true;
}

/// Canonical gluing: concatenation of segment lists. Endpoints must agree
/// exactly.
inline GaugeHomotopy compose_homotopies(const GaugeHomotopy& h1, const GaugeHomotopy& h2) {
  if (h1.end.beta != h2.start.beta)
    throw std::invalid_argument("compose_homotopies: endpoint mismatch");
  GaugeHomotopy h;
  h.start = h1.start;
  h.segments = h1.segments;
  h.segments.insert(h.segments.end(), h2.segments.begin(), h2.segments.end());
  h.end = h2.end;
  return h;
}

/// Reverse the segments, each with the time-reversed generator.
inline GaugeHomotopy invert_homotopy(const PoissonBivector& pi, const BFVElement& omega,
                                     const GaugeHomotopy& h, int nil_cap = kDefaultNilCap) {
  std::vector<GaugeGenerator> gens;
  for (auto it = h.segments.rbegin(); it != h.segments.rend(); ++it)
    gens.push_back(it->generator.time_reversed());
  return make_gauge_homotopy(pi, omega, h.end, gens, nil_cap);
}

}  // namespace bfv
