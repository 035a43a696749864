#pragma once

#include <array>
#include <cmath>

#include "hfv/state.hpp"

namespace hfv {

namespace detail {

// Value with its x and y partial derivatives (forward-mode differentiation).
struct Dual2 {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  friend Dual2 operator+(Dual2 a, Dual2 b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
  friend Dual2 operator-(Dual2 a, Dual2 b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
  friend Dual2 operator*(Dual2 a, Dual2 b) { return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy}; }
  friend Dual2 operator*(double s, Dual2 a) { return {s * a.v, s * a.dx, s * a.dy}; }
  friend Dual2 operator/(Dual2 a, double s) { return {a.v / s, a.dx / s, a.dy / s}; }
};

}  // namespace detail

// One manufactured field: mean + amplitude * f(kx * x + ky * y + phase), f = sin or cos.
struct ManufacturedComponent {
  double mean = 0.0;
  double amplitude = 0.0;
  double kx = 0.0;
  double ky = 0.0;
  double phase = 0.0;
  bool use_cos = false;

  double value(double x, double y) const {
    const double a = kx * x + ky * y + phase;
    return mean + amplitude * (use_cos ? std::cos(a) : std::sin(a));
  }

  detail::Dual2 dual(double x, double y) const {
    const double a = kx * x + ky * y + phase;
    const double f = use_cos ? std::cos(a) : std::sin(a);
    const double df = use_cos ? -std::sin(a) : std::cos(a);
    return {mean + amplitude * f, amplitude * df * kx, amplitude * df * ky};
  }
};

// Smooth supersonic manufactured solution for the Euler equations on the unit
// square. The default mean flow runs at Mach 2 along the diagonal, so every
// edge of [0,1]^2 is supersonic; each perturbation stays monotone over the
// square so no limiter clipping occurs.
struct ManufacturedSolution {
  ManufacturedComponent rho{1.0, 0.08, 0.7, 0.5, 0.1, false};
  ManufacturedComponent u{std::sqrt(2.0), 0.1 * std::sqrt(2.0), 0.5, 0.7, -0.2, false};
  ManufacturedComponent v{std::sqrt(2.0), 0.1 * std::sqrt(2.0), 0.6, 0.6, -1.5, true};
  ManufacturedComponent p{1.0 / 1.4, 0.07 / 1.4, 0.4, 0.8, 0.2, false};

  static ManufacturedSolution constant(const PrimitiveState& w) {
    ManufacturedSolution m;
    m.rho = {w.rho};
    m.u = {w.u};
    m.v = {w.v};
    m.p = {w.p};
    return m;
  }

  PrimitiveState primitive(double x, double y) const {
    return {rho.value(x, y), u.value(x, y), v.value(x, y), p.value(x, y)};
  }
};

// Source term balancing the manufactured solution: S = dF/dx + dG/dy of the
// exact inviscid fluxes, differentiated analytically.
inline FluxVector mms_source(const ManufacturedSolution& m, double x, double y, const GasModel& gas) {
  using detail::Dual2;
  const Dual2 r = m.rho.dual(x, y);
  const Dual2 u = m.u.dual(x, y);
  const Dual2 v = m.v.dual(x, y);
  const Dual2 p = m.p.dual(x, y);
  const Dual2 rho_et = p / (gas.gamma - 1.0) + 0.5 * (r * (u * u + v * v));
  const Dual2 rho_ht = rho_et + p;

  const Dual2 ru = r * u;
  const Dual2 rv = r * v;
  const std::array<Dual2, 4> F{ru, ru * u + p, ru * v, u * rho_ht};
  const std::array<Dual2, 4> G{rv, rv * u, rv * v + p, v * rho_ht};
  FluxVector s;
  for (std::size_t k = 0; k < kNumVars; ++k) s[k] = F[k].dx + G[k].dy;
  return s;
}

}  // namespace hfv
