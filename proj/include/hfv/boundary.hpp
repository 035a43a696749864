#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "hfv/block.hpp"
#include "hfv/state.hpp"

namespace hfv {

struct SupersonicInflow {
  PrimitiveState state;
};
struct SupersonicOutflow {};
struct SlipWall {};
struct NoSlipAdiabaticWall {
  double wall_u = 0.0;  // tangential wall motion, zero for a stationary wall
  double wall_v = 0.0;
};
// Ghost data arrives from the neighbouring worker; nothing is computed locally.
struct Connected {
  int neighbor = -1;
};
// Dirichlet ghost values from an analytic field, used by manufactured-solution runs.
struct ManufacturedDirichlet {
  std::function<PrimitiveState(double, double)> exact;
};

using BoundaryKind =
    std::variant<SupersonicInflow, SupersonicOutflow, SlipWall, NoSlipAdiabaticWall, Connected, ManufacturedDirichlet>;

struct BoundarySpec {
  std::array<BoundaryKind, 4> edges{SupersonicOutflow{}, SupersonicOutflow{}, SupersonicOutflow{},
                                    SupersonicOutflow{}};

  BoundaryKind& operator[](Edge e) { return edges[static_cast<int>(e)]; }
  const BoundaryKind& operator[](Edge e) const { return edges[static_cast<int>(e)]; }

  bool is_connected(Edge e) const { return std::holds_alternative<Connected>((*this)[e]); }
};

inline const char* boundary_kind_name(const BoundaryKind& k) {
  return std::visit(
      [](const auto& v) -> const char* {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SupersonicInflow>) return "supersonic_inflow";
        else if constexpr (std::is_same_v<T, SupersonicOutflow>) return "supersonic_outflow";
        else if constexpr (std::is_same_v<T, SlipWall>) return "slip_wall";
        else if constexpr (std::is_same_v<T, NoSlipAdiabaticWall>) return "no_slip_adiabatic_wall";
        else if constexpr (std::is_same_v<T, Connected>) return "connected";
        else return "manufactured";
      },
      k);
}

namespace detail {

inline ConservedState mirror_normal(const ConservedState& U, const Face& f) {
  const double mn = U.rho_u() * f.nx + U.rho_v() * f.ny;
  return {{U.rho(), U.rho_u() - 2.0 * mn * f.nx, U.rho_v() - 2.0 * mn * f.ny, U.rho_et()}};
}

inline ConservedState no_slip_ghost(const ConservedState& U, const NoSlipAdiabaticWall& wall, const GasModel& gas) {
  PrimitiveState w = primitive_from_conserved(U, gas);
  w.u = 2.0 * wall.wall_u - w.u;
  w.v = 2.0 * wall.wall_v - w.v;
  return conserved_from_primitive(w, gas);
}

// Fill the two ghost cells of one edge line. inner0 touches the boundary
// face, inner1 is the next cell inward; center(k) gives the centre of ghost k.
template <class CenterFn>
void fill_edge(const BoundaryKind& kind, ConservedState& ghost0, ConservedState& ghost1,
               const ConservedState& inner0, const ConservedState& inner1, const Face& face, CenterFn&& center,
               const GasModel& gas) {
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, SupersonicInflow>) {
          const ConservedState q = conserved_from_primitive(k.state, gas);
          ghost0 = q;
          ghost1 = q;
        } else if constexpr (std::is_same_v<T, SupersonicOutflow>) {
          ghost0 = inner0;
          ghost1 = inner0;
        } else if constexpr (std::is_same_v<T, SlipWall>) {
          ghost0 = mirror_normal(inner0, face);
          ghost1 = mirror_normal(inner1, face);
        } else if constexpr (std::is_same_v<T, NoSlipAdiabaticWall>) {
          ghost0 = no_slip_ghost(inner0, k, gas);
          ghost1 = no_slip_ghost(inner1, k, gas);
        } else if constexpr (std::is_same_v<T, ManufacturedDirichlet>) {
          const auto [x0, y0] = center(0);
          const auto [x1, y1] = center(1);
          ghost0 = conserved_from_primitive(k.exact(x0, y0), gas);
          ghost1 = conserved_from_primitive(k.exact(x1, y1), gas);
        }
        // Connected: filled by the ghost exchange.
      },
      kind);
}

}  // namespace detail

// Populate ghost cells on every non-connected edge. West/east edges are filled
// on interior rows first, then south/north over every column of the ghost
// frame so corner ghosts are defined.
inline void apply_boundary(Block& b, GeometryView geom, const BoundarySpec& spec, const GasModel& gas) {
  auto& U = b.U;
  const int ni = b.ni, nj = b.nj;
  const int i_in = ni > 1 ? 1 : 0;
  const int j_in = nj > 1 ? 1 : 0;
  auto centers = [&geom](int i0, int j0, int i1, int j1) {
    return [&geom, i0, j0, i1, j1](int k) {
      return k == 0 ? std::pair{geom.center_x(i0, j0), geom.center_y(i0, j0)}
                    : std::pair{geom.center_x(i1, j1), geom.center_y(i1, j1)};
    };
  };

  if (!spec.is_connected(Edge::west))
    for (int j = 0; j < nj; ++j)
      detail::fill_edge(spec[Edge::west], U(-1, j), U(-2, j), U(0, j), U(i_in, j), geom.i_face(0, j),
                        centers(-1, j, -2, j), gas);
  if (!spec.is_connected(Edge::east))
    for (int j = 0; j < nj; ++j)
      detail::fill_edge(spec[Edge::east], U(ni, j), U(ni + 1, j), U(ni - 1, j), U(ni - 1 - i_in, j),
                        geom.i_face(ni, j), centers(ni, j, ni + 1, j), gas);
  if (!spec.is_connected(Edge::south))
    for (int i = U.i_lo(); i < U.i_hi(); ++i)
      detail::fill_edge(spec[Edge::south], U(i, -1), U(i, -2), U(i, 0), U(i, j_in), geom.j_face(i, 0),
                        centers(i, -1, i, -2), gas);
  if (!spec.is_connected(Edge::north))
    for (int i = U.i_lo(); i < U.i_hi(); ++i)
      detail::fill_edge(spec[Edge::north], U(i, nj), U(i, nj + 1), U(i, nj - 1), U(i, nj - 1 - j_in),
                        geom.j_face(i, nj), centers(i, nj, i, nj + 1), gas);
}

}  // namespace hfv
