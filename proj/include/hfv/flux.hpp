#pragma once

#include <algorithm>
#include <cmath>

#include "hfv/array2d.hpp"
#include "hfv/block.hpp"
#include "hfv/muscl.hpp"
#include "hfv/state.hpp"

namespace hfv {

// Fraction of the Roe-averaged sound speed below which the acoustic
// eigenvalues are smoothed (Harten).
inline constexpr double kEntropyFixFraction = 0.1;

// Exact inviscid flux through a face with unit normal (nx, ny).
inline FluxVector analytic_inviscid_flux(const PrimitiveState& w, double nx, double ny, const GasModel& gas) {
  const double vn = nx * w.u + ny * w.v;
  const double rho_ht = w.p / (gas.gamma - 1.0) + 0.5 * w.rho * (w.u * w.u + w.v * w.v) + w.p;
  return {{w.rho * vn, w.rho * w.u * vn + nx * w.p, w.rho * w.v * vn + ny * w.p, rho_ht * vn}};
}

inline double harten_fix(double lambda, double delta) {
  const double a = std::abs(lambda);
  if (a >= delta) return a;
  return (lambda * lambda + delta * delta) / (2.0 * delta);
}

// Roe approximate Riemann flux with Harten's entropy fix on the acoustic waves.
inline FluxVector inviscid_flux(const ConservedState& UL, const ConservedState& UR, double nx, double ny,
                                const GasModel& gas) {
  const PrimitiveState L = primitive_from_conserved(UL, gas);
  const PrimitiveState R = primitive_from_conserved(UR, gas);
  const double g = gas.gamma;

  const double vnL = nx * L.u + ny * L.v;
  const double vnR = nx * R.u + ny * R.v;
  const double hL = (UL.rho_et() + L.p) / L.rho;
  const double hR = (UR.rho_et() + R.p) / R.rho;

  const double sL = std::sqrt(L.rho);
  const double sR = std::sqrt(R.rho);
  const double inv = 1.0 / (sL + sR);
  const double rho = sL * sR;
  const double u = (sL * L.u + sR * R.u) * inv;
  const double v = (sL * L.v + sR * R.v) * inv;
  const double h = (sL * hL + sR * hR) * inv;
  const double q2 = u * u + v * v;
  const double c2 = std::max((g - 1.0) * (h - 0.5 * q2), kDivisionGuard);
  const double c = std::sqrt(c2);
  const double vn = nx * u + ny * v;

  const double dp = R.p - L.p;
  const double drho = R.rho - L.rho;
  const double du = R.u - L.u;
  const double dv = R.v - L.v;
  const double dvn = vnR - vnL;

  const double delta = std::max(kEntropyFixFraction * c, kDivisionGuard);
  const double l1 = harten_fix(vn - c, delta);
  const double l2 = std::abs(vn);
  const double l4 = harten_fix(vn + c, delta);

  const double a1 = l1 * (dp - rho * c * dvn) / (2.0 * c2);
  const double a2 = l2 * (drho - dp / c2);
  const double a3 = l2 * rho;
  const double a4 = l4 * (dp + rho * c * dvn) / (2.0 * c2);

  FluxVector diss;
  diss[0] = a1 + a2 + a4;
  diss[1] = a1 * (u - c * nx) + a2 * u + a3 * (du - dvn * nx) + a4 * (u + c * nx);
  diss[2] = a1 * (v - c * ny) + a2 * v + a3 * (dv - dvn * ny) + a4 * (v + c * ny);
  diss[3] = a1 * (h - c * vn) + a2 * 0.5 * q2 + a3 * (u * du + v * dv - vn * dvn) + a4 * (h + c * vn);

  FluxVector f;
  f[0] = 0.5 * (L.rho * vnL + R.rho * vnR - diss[0]);
  f[1] = 0.5 * (UL.rho_u() * vnL + nx * L.p + UR.rho_u() * vnR + nx * R.p - diss[1]);
  f[2] = 0.5 * (UL.rho_v() * vnL + ny * L.p + UR.rho_v() * vnR + ny * R.p - diss[2]);
  f[3] = 0.5 * (L.rho * hL * vnL + R.rho * hR * vnR - diss[3]);
  return f;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct FaceGradients {
  Vec2 u;  // velocity x-component
  Vec2 v;  // velocity y-component
  Vec2 T;  // temperature
};

// Laminar viscous flux with Stokes's hypothesis, lambda = -2 mu / 3.
inline FluxVector viscous_flux(const FaceGradients& grad, const PrimitiveState& face, double nx, double ny,
                               const GasModel& gas) {
  const double mu = gas.mu;
  const double lambda = -2.0 / 3.0 * mu;
  const double div = grad.u.x + grad.v.y;
  const double txx = 2.0 * mu * grad.u.x + lambda * div;
  const double tyy = 2.0 * mu * grad.v.y + lambda * div;
  const double txy = mu * (grad.u.y + grad.v.x);
  const double k = gas.conductivity();
  const double theta_x = face.u * txx + face.v * txy + k * grad.T.x;
  const double theta_y = face.u * txy + face.v * tyy + k * grad.T.y;
  return {{0.0, nx * txx + ny * txy, nx * txy + ny * tyy, nx * theta_x + ny * theta_y}};
}

// Green-Gauss gradient with arithmetic face averaging over the index box
// [i0, i1) x [j0, j1). Every cell in the box needs its four edge neighbours.
template <class Getter>
void gradient_green_gauss(Getter&& value, GeometryView geom, int i0, int i1, int j0, int j1, Array2D<Vec2>& out) {
  if (out.i_lo() != i0 || out.i_hi() != i1 || out.j_lo() != j0 || out.j_hi() != j1)
    out = Array2D<Vec2>(i0, i1, j0, j1);
  for (int j = j0; j < j1; ++j) {
    for (int i = i0; i < i1; ++i) {
      const double c = value(i, j);
      const Face& fw = geom.i_face(i, j);
      const Face& fe = geom.i_face(i + 1, j);
      const Face& fs = geom.j_face(i, j);
      const Face& fn = geom.j_face(i, j + 1);
      const double pe = 0.5 * (c + value(i + 1, j)) * fe.area;
      const double pw = 0.5 * (c + value(i - 1, j)) * fw.area;
      const double pn = 0.5 * (c + value(i, j + 1)) * fn.area;
      const double ps = 0.5 * (c + value(i, j - 1)) * fs.area;
      const double inv_vol = 1.0 / geom.volume(i, j);
      out(i, j).x = (pe * fe.nx - pw * fw.nx + pn * fn.nx - ps * fs.nx) * inv_vol;
      out(i, j).y = (pe * fe.ny - pw * fw.ny + pn * fn.ny - ps * fs.ny) * inv_vol;
    }
  }
}

// Convenience overload over a stored scalar field.
inline Array2D<Vec2> gradient_green_gauss(const Array2D<double>& field, GeometryView geom, int i0, int i1, int j0,
                                          int j1) {
  Array2D<Vec2> out;
  gradient_green_gauss([&](int i, int j) { return field(i, j); }, geom, i0, i1, j0, j1, out);
  return out;
}

}  // namespace hfv
