#pragma once

#include "bfv/element.hpp"
#include "bfv/poisson.hpp"

namespace bfv {

/// The BFV bracket for a trivial bundle with flat connection: the coefficient
/// Poisson bracket extended as a biderivation (ghost words are Pi-constants)
/// plus the pairing bracket [.,.]_G. Restricts to {.,.}_Pi on functions and
/// to the fiber pairing on ghost/momentum pairs; total degree 0.
inline BFVElement bfv_bracket(const PoissonBivector& pi, const BFVElement& a,
                              const BFVElement& b) {
  a.check_context(b);
  if (!(*pi.table() == *a.table()))
    throw std::invalid_argument("bfv_bracket: mismatched problem contexts");
  BFVElement r = g_bracket(a, b);
  for (const auto& [wa, ca] : a.terms()) {
    for (const auto& [wb, cb] : b.terms()) {
      Poly f = pi.bracket(ca, cb);
      if (f.is_zero()) continue;
      GhostWord w;
      int sign = word_mul(wa, wb, &w);
      if (sign == 0) continue;
      if (sign < 0) f = -f;
      r.add_term(w, f);
    }
  }
  return r;
}

}  // namespace bfv
