#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfv/bracket.hpp"
#include "bfv/koszul.hpp"
#include "bfv/poisson.hpp"

namespace bfv {

/// First non-exact obstruction met during homological perturbation, together
/// with its nonzero image under the projection to the base complex.
struct ObstructionWitness {
  BFVElement obstruction;
  BFVElement pr_image;
  int iteration = 0;
};

struct PerturbationStep {
  int iteration;
  std::uint32_t resolution_degree;
  BFVElement obstruction;
  BFVElement correction;
};

/// Degree +1 element with tautological (1,0) part and vanishing self-bracket.
struct Charge {
  BFVElement omega;
  int iterations = 0;
  std::vector<PerturbationStep> trace;
};

struct ChargeResult {
  std::optional<Charge> charge;
  std::optional<ObstructionWitness> obstruction;
  std::vector<PerturbationStep> trace;

  bool ok() const { return charge.has_value(); }
};

/// Geometric membership data: Omega_0 + beta_0 = A(Omega_0 + p*(mu)) with
/// -mu coisotropic. Witnesses are verified and transported, never discovered.
struct GeometricWitness {
  EndomorphismField A;
  SectionMu mu;
};

/// Total-degree +1 element subject to the Maurer-Cartan equation, optionally
/// carrying its geometric witness.
struct MCElement {
  BFVElement beta;
  std::optional<GeometricWitness> witness;
};

namespace detail {

inline BFVElement momentum_component(const BFVElement& a, std::uint32_t q) {
  BFVElement r(a.table());
  for (const auto& [w, c] : a.terms())
    if (w.momentum_degree() == q) r.add_term(w, c);
  return r;
}

struct PerturbOutcome {
  std::optional<BFVElement> total;
  std::optional<ObstructionWitness> obstruction;
  std::vector<PerturbationStep> trace;
  int iterations = 0;
};

/// Shared homological perturbation loop: repeatedly cancel the
/// lowest-resolution-degree part of half the self-bracket with the conjugated
/// homotopy of the reference section, or stop at a non-exact class. The
/// momentum degree of the obstruction strictly increases, so the loop closes
/// within k+1 iterations; running past the bound signals a sign-ledger bug.
inline PerturbOutcome perturb_to_nilpotent(const PoissonBivector& pi,
                                           const GeometricSection& ref, BFVElement element) {
  PerturbOutcome out;
  const int max_iter = static_cast<int>(pi.table()->fiber_count()) + 1;
  for (int iter = 1; iter <= max_iter; ++iter) {
    out.iterations = iter;
    BFVElement R = Rational(1, 2) * bfv_bracket(pi, element, element);
    if (R.is_zero()) {
      out.total = std::move(element);
      return out;
    }
    const std::uint32_t q_low = R.min_momentum_degree();
    BFVElement r_low = momentum_component(R, q_low);
    BFVElement pr_image = ref.pr(r_low);
    if (!pr_image.is_zero()) {
      out.obstruction = ObstructionWitness{std::move(r_low), std::move(pr_image), iter};
      return out;
    }
    BFVElement correction = -ref.homotopy(r_low);
    element += correction;
    out.trace.push_back(PerturbationStep{iter, q_low, std::move(r_low), std::move(correction)});
  }
  throw std::runtime_error(
      "homological perturbation exceeded the iteration bound; this signals a "
      "sign-ledger inconsistency, not a geometric obstruction");
}

}  // namespace detail

/// Build the charge by homological perturbation from the tautological
/// section. Succeeds exactly when the zero section is coisotropic; otherwise
/// the first non-exact class is returned as a witness.
inline ChargeResult construct_charge(const PoissonBivector& pi) {
  const VarTablePtr& table = pi.table();
  GeometricSection ref = GeometricSection::normalized(
      table, SectionMu(table->fiber_count(), Poly(table->var_count())));
  auto out = detail::perturb_to_nilpotent(pi, ref, BFVElement::tautological(table));
  ChargeResult result;
  result.trace = out.trace;
  if (out.total)
    result.charge = Charge{std::move(*out.total), out.iterations, std::move(out.trace)};
  else
    result.obstruction = std::move(out.obstruction);
  return result;
}

struct MCCheckResult {
  bool ok;
  BFVElement residual;
};

/// Maurer-Cartan test: [Omega + beta, Omega + beta]_BFV = 0, returned with
/// the exact residual on failure.
inline MCCheckResult mc_check(const PoissonBivector& pi, const BFVElement& omega,
                              const BFVElement& beta) {
  if (!beta.is_homogeneous_total(1))
    throw std::invalid_argument("mc_check: element is not of total degree +1");
  BFVElement total = omega + beta;
  BFVElement residual = bfv_bracket(pi, total, total);
  return MCCheckResult{residual.is_zero(), std::move(residual)};
}

struct LiftResult {
  std::optional<MCElement> mc;
  std::optional<CoisotropyWitness> not_coisotropic;
  std::optional<ObstructionWitness> obstruction;
  std::vector<PerturbationStep> trace;
  int iterations = 0;

  bool ok() const { return mc.has_value(); }
};

/// Extend the normalized seed p*(mu) to a Maurer-Cartan element by
/// perturbation against delta[Omega_0 + p*(mu)] and its conjugated homotopy.
/// Precondition (checked): -mu is a coisotropic section.
inline LiftResult lift_normalized_mc(const PoissonBivector& pi, const BFVElement& omega,
                                     const SectionMu& mu) {
  const VarTablePtr& table = pi.table();
  validate_section(*table, mu);
  LiftResult result;
  if (auto w = check_coisotropic_section(pi, negate_section(mu))) {
    result.not_coisotropic = std::move(w);
    return result;
  }
  GeometricSection ref = GeometricSection::normalized(table, mu);
  auto out =
      detail::perturb_to_nilpotent(pi, ref, omega + BFVElement::from_section(table, mu));
  result.trace = std::move(out.trace);
  result.iterations = out.iterations;
  if (out.total) {
    MCElement mc;
    mc.beta = *out.total - omega;
    mc.witness = GeometricWitness{EndomorphismField::identity(table), mu};
    result.mc = std::move(mc);
  } else {
    result.obstruction = std::move(out.obstruction);
  }
  return result;
}

/// L_nor: read mu off the normalized (1,0) component and return -mu.
inline SectionMu l_nor(const MCElement& mc) {
  const VarTablePtr& table = mc.beta.table();
  const std::size_t k = table->fiber_count();
  SectionMu mu(k, Poly(table->var_count()));
  for (const auto& [w, c] : mc.beta.terms()) {
    if (w.momentum_degree() != 0 || w.ghost_degree() != 1) continue;
    for (std::size_t i = 0; i < k; ++i) {
      if (c.depends_on(table->fiber_index(i)))
        throw std::invalid_argument(
            "l_nor: (1,0) component depends on fiber variables; cannot reconstruct mu "
            "without a witness");
    }
    if (table->has_time() && c.depends_on(table->time_index()))
      throw std::invalid_argument("l_nor: (1,0) component depends on the time variable");
    std::uint32_t i = 0;
    while (!(w.ghosts & (1u << i))) ++i;
    mu[i] = c;
  }
  return negate_section(mu);
}

/// L_geo: project through the stored witness.
inline SectionMu l_geo(const MCElement& mc) {
  if (!mc.witness)
    throw std::invalid_argument("l_geo: cannot reconstruct mu without a witness");
  return negate_section(mc.witness->mu);
}

struct WitnessCheck {
  bool ok;
  std::string discrepancy;          // empty when ok
  std::optional<BFVElement> mismatch;  // (a) failure: the nonzero difference
  std::optional<CoisotropyWitness> coisotropy;  // (b) failure payload
};

/// Verify the geometric-membership conditions:
///   (a) Omega_0 + beta_0 = A(Omega_0 + p*(mu)) exactly,
///   (b) -mu coisotropic.
/// The witness determinant must be a positive constant (fiberwise
/// orientation preserving); anything else is a hard error.
inline WitnessCheck verify_geometric_witness(const PoissonBivector& pi, const MCElement& mc,
                                             const EndomorphismField& A, const SectionMu& mu) {
  const VarTablePtr& table = pi.table();
  validate_section(*table, mu);
  Poly d = A.det();
  if (d.total_degree() != 0 || d.is_zero())
    throw std::invalid_argument(
        "verify_geometric_witness: invertibility not certifiable on polynomial data "
        "(determinant is not a nonzero constant)");
  if (d.constant_term() < 0)
    throw std::invalid_argument(
        "verify_geometric_witness: negative constant determinant violates the "
        "orientation-preserving requirement");
  BFVElement lhs = BFVElement::tautological(table) + mc.beta.component(1, 0);
  BFVElement rhs = A.apply_to_section(BFVElement::tautological(table) +
                                      BFVElement::from_section(table, mu));
  if (lhs != rhs) {
    WitnessCheck w{false, "section equation Omega_0 + beta_0 = A(Omega_0 + p*(mu)) fails", {}, {}};
    w.mismatch = lhs - rhs;
    return w;
  }
  if (auto cw = check_coisotropic_section(pi, negate_section(mu))) {
    WitnessCheck w{false, "-mu is not a coisotropic section", {}, {}};
    w.coisotropy = std::move(cw);
    return w;
  }
  return WitnessCheck{true, "", {}, {}};
}

/// Connecting endomorphism of a section family: M_t is the conjugated
/// homotopy image of Omega_0 + sigma_t, read as a k x k matrix over
/// Poly(x, y, t). Satisfies M_0 = id and M_t(Omega_0 + sigma_0) =
/// Omega_0 + sigma_t exactly. Requires sigma_{t=0} = sigma_0 and that the
/// family vanishes on the reference zero locus (the conjugated projection of
/// Omega_0 + sigma_t must be zero); families violating the latter admit no
/// polynomial connecting endomorphism at all.
inline EndomorphismField connecting_endomorphism(const GeometricSection& sigma0,
                                                 const BFVElement& sigma_t) {
  check_fiber_section(sigma_t);
  const VarTablePtr& table = sigma0.table();
  BFVElement full_t = BFVElement::tautological(table) + sigma_t;
  if (table->has_time()) {
    std::map<std::size_t, Poly> at0{{table->time_index(), Poly(table->var_count())}};
    if (full_t.subst_coefficients(at0) != sigma0.sigma_full())
      throw std::invalid_argument("connecting_endomorphism: family does not start at sigma_0");
  } else if (full_t != sigma0.sigma_full()) {
    throw std::invalid_argument("connecting_endomorphism: family does not start at sigma_0");
  }
  if (!sigma0.pr(full_t).is_zero())
    throw std::invalid_argument(
        "connecting_endomorphism: family does not vanish on the reference zero locus; "
        "no polynomial connecting endomorphism exists");
  return endo_from_element(sigma0.homotopy(full_t));
}

}  // namespace bfv
