#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "bfv/charge.hpp"
#include "bfv/poisson.hpp"

namespace bfv {

using FailureWitness = std::variant<JacobiWitness, CoisotropyWitness, ObstructionWitness>;

/// Human-readable diagnostic naming the violated identity, the index data and
/// the nonzero polynomial payload.
inline std::string explain_failure(const std::optional<FailureWitness>& witness,
                                   const VarTable& table) {
  if (!witness) throw std::invalid_argument("explain_failure: no failure to explain");
  struct Visitor {
    const VarTable& table;
    std::string operator()(const JacobiWitness& w) const {
      return "Jacobi identity fails: jacobiator component at coordinate triple (" +
             std::to_string(w.a) + "," + std::to_string(w.b) + "," + std::to_string(w.c) +
             ") equals " + poly_to_string(w.component, table);
    }
    std::string operator()(const CoisotropyWitness& w) const {
      return "vanishing ideal is not a coisotrope: {g_" + std::to_string(w.i) + ", g_" +
             std::to_string(w.j) + "} restricted to the graph equals " +
             poly_to_string(w.restricted, table);
    }
    std::string operator()(const ObstructionWitness& w) const {
      return "charge obstruction at iteration " + std::to_string(w.iteration) +
             ": class survives the projection to the base complex, pr-image " +
             element_to_string(w.pr_image);
    }
  };
  return std::visit(Visitor{table}, *witness);
}

}  // namespace bfv
