#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bfv/poisson.hpp"

namespace bfv {

/// The numeric lane is validation-only and quarantined from the exact core:
/// nothing here feeds back into symbolic results.

struct FlowOverflow : std::runtime_error {
  FlowOverflow() : std::runtime_error("numeric overflow in Hamiltonian flow integration") {}
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> points;  // one coordinate vector per time
};

namespace detail {

inline void check_finite(const std::vector<double>& x) {
  for (double v : x)
    if (!std::isfinite(v) || std::fabs(v) > 1e150) throw FlowOverflow();
}

}  // namespace detail

/// Fixed-step classical Runge-Kutta integration of dx/dt = X_{F_t}(x) on
/// [0, t_end], sampling after every step. Deterministic for fixed inputs.
inline Trajectory numeric_flow_sample(const PoissonBivector& pi, const Poly& F,
                                      const std::vector<Rational>& p0, int steps,
                                      double t_end = 1.0) {
  if (steps < 1) throw std::invalid_argument("numeric_flow_sample: steps must be >= 1");
  const VarTable& table = *pi.table();
  const std::size_t N = pi.coord_count();
  if (p0.size() != N) throw std::invalid_argument("numeric_flow_sample: bad point arity");
  if (F.nvars() != table.var_count()) throw std::logic_error("numeric_flow_sample: arity mismatch");

  VectorField X = hamiltonian_vector_field(pi, F);

  auto eval_field = [&](const std::vector<double>& x, double t) {
    std::vector<double> full(table.var_count(), 0.0);
    for (std::size_t i = 0; i < N; ++i) full[i] = x[i];
    if (table.has_time()) full[table.time_index()] = t;
    std::vector<double> v(N);
    for (std::size_t a = 0; a < N; ++a) v[a] = X[a].eval(full);
    return v;
  };

  std::vector<double> x(N);
  for (std::size_t i = 0; i < N; ++i) x[i] = to_double(p0[i]);

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.points.push_back(x);

  const double h = t_end / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    auto k1 = eval_field(x, t);
    std::vector<double> tmp(N);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    auto k2 = eval_field(tmp, t + 0.5 * h);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    auto k3 = eval_field(tmp, t + 0.5 * h);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * k3[i];
    auto k4 = eval_field(tmp, t + h);
    for (std::size_t i = 0; i < N; ++i)
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    detail::check_finite(x);
    traj.times.push_back((s + 1) * h);
    traj.points.push_back(x);
  }
  return traj;
}

}  // namespace bfv
