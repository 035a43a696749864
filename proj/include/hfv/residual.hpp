#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "hfv/array2d.hpp"
#include "hfv/block.hpp"
#include "hfv/flux.hpp"
#include "hfv/muscl.hpp"
#include "hfv/state.hpp"

namespace hfv {

enum class FlowMode { euler, navier_stokes };

inline const char* flow_mode_name(FlowMode m) { return m == FlowMode::euler ? "euler" : "ns"; }

struct ResidualOptions {
  MusclParams muscl;
  FlowMode mode = FlowMode::euler;
  GasModel gas;
  // Volumetric source S(x, y); empty for physical cases.
  std::function<FluxVector(double, double)> source;
};

// Scratch storage reused across residual evaluations of one block.
struct ResidualWorkspace {
  Array2D<FluxVector> i_flux;  // area-weighted flux through i_face(f, j), f in [0, ni]
  Array2D<FluxVector> j_flux;  // area-weighted flux through j_face(i, f), f in [0, nj]
  Array2D<double> u, v, T;
  Array2D<Vec2> grad_u, grad_v, grad_T;
};

namespace detail {

template <class T>
void ensure_shape(Array2D<T>& a, int i0, int i1, int j0, int j1) {
  if (a.i_lo() != i0 || a.i_hi() != i1 || a.j_lo() != j0 || a.j_hi() != j1) a = Array2D<T>(i0, i1, j0, j1);
}

// Face gradient: mean of the two cell gradients with its component along the
// centre-to-centre line replaced by the direct difference. The plain mean
// alone lets odd-even modes through.
inline FaceGradients face_gradients(const ResidualWorkspace& ws, GeometryView geom, int ia, int ja, int ib, int jb) {
  const double dx = geom.center_x(ib, jb) - geom.center_x(ia, ja);
  const double dy = geom.center_y(ib, jb) - geom.center_y(ia, ja);
  const double len = std::hypot(dx, dy);
  const double tx = dx / len, ty = dy / len;
  auto corrected = [&](const Array2D<Vec2>& g, const Array2D<double>& phi) {
    Vec2 m{0.5 * (g(ia, ja).x + g(ib, jb).x), 0.5 * (g(ia, ja).y + g(ib, jb).y)};
    const double jump = (phi(ib, jb) - phi(ia, ja)) / len - (m.x * tx + m.y * ty);
    m.x += jump * tx;
    m.y += jump * ty;
    return m;
  };
  return {corrected(ws.grad_u, ws.u), corrected(ws.grad_v, ws.v), corrected(ws.grad_T, ws.T)};
}

inline void viscous_prepare(const Block& b, GeometryView geom, const GasModel& gas, ResidualWorkspace& ws) {
  const auto& U = b.U;
  ensure_shape(ws.u, U.i_lo(), U.i_hi(), U.j_lo(), U.j_hi());
  ensure_shape(ws.v, U.i_lo(), U.i_hi(), U.j_lo(), U.j_hi());
  ensure_shape(ws.T, U.i_lo(), U.i_hi(), U.j_lo(), U.j_hi());
  for (int j = U.j_lo(); j < U.j_hi(); ++j) {
    for (int i = U.i_lo(); i < U.i_hi(); ++i) {
      const PrimitiveState w = primitive_from_conserved(U(i, j), gas, geom.offset() + i, j);
      ws.u(i, j) = w.u;
      ws.v(i, j) = w.v;
      ws.T(i, j) = temperature(w, gas);
    }
  }
  const int i0 = -1, i1 = b.ni + 1, j0 = -1, j1 = b.nj + 1;
  gradient_green_gauss([&](int i, int j) { return ws.u(i, j); }, geom, i0, i1, j0, j1, ws.grad_u);
  gradient_green_gauss([&](int i, int j) { return ws.v(i, j); }, geom, i0, i1, j0, j1, ws.grad_v);
  gradient_green_gauss([&](int i, int j) { return ws.T(i, j); }, geom, i0, i1, j0, j1, ws.grad_T);
}

// Convective plus viscous flux through one face, times its area. Cells a and b
// sit on the low and high side of the face.
inline FluxVector face_flux(const ConservedState& QL, const ConservedState& QR, const Face& face,
                            const ResidualOptions& opt, const ResidualWorkspace& ws, GeometryView geom, int ia, int ja, int ib, int jb,
                            int gi, int gj) {
  FluxVector f;
  try {
    f = inviscid_flux(QL, QR, face.nx, face.ny, opt.gas);
  } catch (const InvalidStateError& e) {
    throw InvalidStateError(std::string("reconstructed face state: ") + e.what(), gi, gj);
  }
  if (opt.mode == FlowMode::navier_stokes) {
    const PrimitiveState fs{0.0, 0.5 * (ws.u(ia, ja) + ws.u(ib, jb)), 0.5 * (ws.v(ia, ja) + ws.v(ib, jb)), 0.0};
    f -= viscous_flux(face_gradients(ws, geom, ia, ja, ib, jb), fs, face.nx, face.ny, opt.gas);
  }
  return f * face.area;
}

// Limiter lookup shared by both residual variants: the four values at faces
// f-1, f, f, f+1 along one line, given a callable returning (plus, minus).
template <class Lookup>
FaceLimiters gather_limiters(Lookup&& at, int f) {
  const FaceLimiterPair lo = at(f - 1);
  const FaceLimiterPair mid = at(f);
  const FaceLimiterPair hi = at(f + 1);
  return {lo.plus, mid.minus, mid.plus, hi.minus};
}

template <class LimiterSource>
void residual_impl(const Block& b, GeometryView geom, LimiterSource&& limiters, const ResidualOptions& opt,
                   Array2D<FluxVector>& R, ResidualWorkspace& ws) {
  b.require_ghosts();
  const int ni = b.ni, nj = b.nj;
  const auto& U = b.U;
  const int off = geom.offset();
  ensure_shape(R, 0, ni, 0, nj);
  ensure_shape(ws.i_flux, 0, ni + 1, 0, nj);
  ensure_shape(ws.j_flux, 0, ni, 0, nj + 1);
  if (opt.mode == FlowMode::navier_stokes) viscous_prepare(b, geom, opt.gas, ws);

  for (int j = 0; j < nj; ++j) {
    for (int f = 0; f <= ni; ++f) {
      const FaceLimiters psi = gather_limiters([&](int k) { return limiters.i_face(k, j); }, f);
      const auto [QL, QR] = muscl_reconstruct(U(f - 2, j), U(f - 1, j), U(f, j), U(f + 1, j), psi, opt.muscl);
      ws.i_flux(f, j) = face_flux(QL, QR, geom.i_face(f, j), opt, ws, geom, f - 1, j, f, j, off + f, j);
    }
  }
  for (int i = 0; i < ni; ++i) {
    for (int f = 0; f <= nj; ++f) {
      const FaceLimiters psi = gather_limiters([&](int k) { return limiters.j_face(i, k); }, f);
      const auto [QL, QR] = muscl_reconstruct(U(i, f - 2), U(i, f - 1), U(i, f), U(i, f + 1), psi, opt.muscl);
      ws.j_flux(i, f) = face_flux(QL, QR, geom.j_face(i, f), opt, ws, geom, i, f - 1, i, f, off + i, f);
    }
  }

  for (int j = 0; j < nj; ++j) {
    for (int i = 0; i < ni; ++i) {
      FluxVector r = ws.i_flux(i + 1, j);
      r -= ws.i_flux(i, j);
      r += ws.j_flux(i, j + 1);
      r -= ws.j_flux(i, j);
      if (opt.source) r -= geom.volume(i, j) * opt.source(geom.center_x(i, j), geom.center_y(i, j));
      R(i, j) = r;
    }
  }
}

struct StoredLimiters {
  const LimiterField& field;
  FaceLimiterPair i_face(int f, int j) const { return field.i_faces(f, j); }
  FaceLimiterPair j_face(int i, int f) const { return field.j_faces(i, f); }
};

// Recomputes each limiter from the state at the point of use.
struct InlineLimiters {
  const Array2D<ConservedState>& U;
  static FaceLimiterPair pair(const ConservedState& qm2, const ConservedState& qm1, const ConservedState& q0,
                              const ConservedState& qp1, bool has_plus, bool has_minus) {
    const StateVector d0 = q0 - qm1;
    FaceLimiterPair p;
    if (has_plus) p.plus = van_albada(d0, qp1 - q0);
    if (has_minus) p.minus = van_albada(qm1 - qm2, d0);
    return p;
  }
  FaceLimiterPair i_face(int f, int j) const {
    const bool has_minus = f - 2 >= U.i_lo();
    const bool has_plus = f + 1 < U.i_hi();
    return pair(has_minus ? U(f - 2, j) : ConservedState{}, U(f - 1, j), U(f, j),
                has_plus ? U(f + 1, j) : ConservedState{}, has_plus, has_minus);
  }
  FaceLimiterPair j_face(int i, int f) const {
    const bool has_minus = f - 2 >= U.j_lo();
    const bool has_plus = f + 1 < U.j_hi();
    return pair(has_minus ? U(i, f - 2) : ConservedState{}, U(i, f - 1), U(i, f),
                has_plus ? U(i, f + 1) : ConservedState{}, has_plus, has_minus);
  }
};

}  // namespace detail

// Spatial residual R = sum over faces of (F_inv - F_visc) * ds, minus vol * S,
// with limiters read from a field filled beforehand by compute_limiters.
inline void residual(const Block& b, GeometryView geom, const LimiterField& limiters, const ResidualOptions& opt,
                     Array2D<FluxVector>& R, ResidualWorkspace& ws) {
  detail::residual_impl(b, geom, detail::StoredLimiters{limiters}, opt, R, ws);
}

// Same operator with every limiter recomputed at the face that needs it.
inline void residual_inline_limiters(const Block& b, GeometryView geom, const ResidualOptions& opt,
                                     Array2D<FluxVector>& R, ResidualWorkspace& ws) {
  detail::residual_impl(b, geom, detail::InlineLimiters{b.U}, opt, R, ws);
}

}  // namespace hfv
