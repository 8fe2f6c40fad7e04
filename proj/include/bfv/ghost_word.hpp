#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace bfv {

constexpr std::size_t kMaxFiberRank = 32;

/// One odd generator slot: ghost e_i or ghost momentum eps_i.
/// Global generator order (for all Koszul sign bookkeeping):
///   e_1 < e_2 < ... < e_k < eps_1 < ... < eps_k.
struct OddGenerator {
  bool momentum;       // false: e_i, true: eps_i
  std::uint32_t index; // 0-based fiber index
};

/// Basis word e_I (x) eps_J of the ghost algebra, stored as two bitmasks over
/// the fiber indices. Canonical form: ghosts first, momenta second, each set
/// ascending. All generators are odd; products pick up a sign per
/// transposition needed to reach canonical form.
struct GhostWord {
  std::uint32_t ghosts = 0;   // set I
  std::uint32_t momenta = 0;  // set J

  std::uint32_t ghost_degree() const { return std::popcount(ghosts); }
  std::uint32_t momentum_degree() const { return std::popcount(momenta); }
  /// Parity of the word: (p + q) mod 2.
  std::uint32_t parity() const { return (ghost_degree() + momentum_degree()) & 1u; }
  int total_degree() const {
    return static_cast<int>(ghost_degree()) - static_cast<int>(momentum_degree());
  }
  bool empty() const { return ghosts == 0 && momenta == 0; }

  friend bool operator==(const GhostWord& a, const GhostWord& b) {
    return a.ghosts == b.ghosts && a.momenta == b.momenta;
  }
  friend bool operator<(const GhostWord& a, const GhostWord& b) {
    return std::tuple(a.ghost_degree(), a.momentum_degree(), a.ghosts, a.momenta) <
           std::tuple(b.ghost_degree(), b.momentum_degree(), b.ghosts, b.momenta);
  }
};

namespace detail {

inline std::uint32_t bits_below(std::uint32_t i) {
  if (i >= 32) return 0xFFFFFFFFu;
  return (i == 0) ? 0u : ((1u << i) - 1u);
}
inline std::uint32_t bits_above(std::uint32_t i) { return ~bits_below(i + 1); }

/// Number of generators of w strictly before slot g in the global order.
inline int count_before(const GhostWord& w, const OddGenerator& g) {
  if (!g.momentum) return std::popcount(w.ghosts & bits_below(g.index));
  return std::popcount(w.ghosts) + std::popcount(w.momenta & bits_below(g.index));
}

/// Number of generators of w strictly after slot g in the global order.
inline int count_after(const GhostWord& w, const OddGenerator& g) {
  if (!g.momentum)
    return std::popcount(w.ghosts & bits_above(g.index)) + std::popcount(w.momenta);
  return std::popcount(w.momenta & bits_above(g.index));
}

}  // namespace detail

/// Product of two canonical words. Returns the sign in {-1,0,+1}; 0 when a
/// generator repeats. On nonzero sign, *out is the canonical concatenation.
inline int word_mul(const GhostWord& a, const GhostWord& b, GhostWord* out) {
  if ((a.ghosts & b.ghosts) || (a.momenta & b.momenta)) return 0;
  // Inversions between the sorted sequences of a and b: for each generator g
  // of b, the generators of a that must move past it.
  int inversions = 0;
  for (std::uint32_t i = 0; i < kMaxFiberRank; ++i) {
    if (b.ghosts & (1u << i))
      inversions += detail::count_after(a, OddGenerator{false, i});
    if (b.momenta & (1u << i))
      inversions += detail::count_after(a, OddGenerator{true, i});
  }
  out->ghosts = a.ghosts | b.ghosts;
  out->momenta = a.momenta | b.momenta;
  return (inversions & 1) ? -1 : 1;
}

/// Left odd derivative d/dg acting on a word: zero if g is absent, otherwise
/// remove g with sign (-1)^(number of generators before g).
inline int word_derive_left(const GhostWord& w, const OddGenerator& g, GhostWord* out) {
  std::uint32_t bit = 1u << g.index;
  if (g.momentum ? !(w.momenta & bit) : !(w.ghosts & bit)) return 0;
  *out = w;
  if (g.momentum)
    out->momenta &= ~bit;
  else
    out->ghosts &= ~bit;
  return (detail::count_before(w, g) & 1) ? -1 : 1;
}

/// Right odd derivative: sign counts the generators after g instead.
inline int word_derive_right(const GhostWord& w, const OddGenerator& g, GhostWord* out) {
  std::uint32_t bit = 1u << g.index;
  if (g.momentum ? !(w.momenta & bit) : !(w.ghosts & bit)) return 0;
  *out = w;
  if (g.momentum)
    out->momenta &= ~bit;
  else
    out->ghosts &= ~bit;
  return (detail::count_after(w, g) & 1) ? -1 : 1;
}

inline std::string word_to_string(const GhostWord& w) {
  if (w.empty()) return "";
  auto list = [](std::uint32_t mask) {
    std::string s;
    for (std::uint32_t i = 0; i < kMaxFiberRank; ++i) {
      if (!(mask & (1u << i))) continue;
      if (!s.empty()) s += ",";
      s += std::to_string(i + 1);
    }
    return s;
  };
  std::string out;
  if (w.ghosts) out += "e{" + list(w.ghosts) + "}";
  if (w.momenta) {
    if (!out.empty()) out += "*";
    out += "eps{" + list(w.momenta) + "}";
  }
  return out;
}

}  // namespace bfv
