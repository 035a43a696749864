#pragma once

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hfv/array2d.hpp"

namespace hfv {

inline constexpr int kGhostDepth = 2;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structured quadrilateral block. Node (i, j) for i in [-g, ni + g], j in
// [-g, nj + g]; interior cells span nodes [0, ni] x [0, nj].
struct BlockGrid {
  int ni = 0;
  int nj = 0;
  int ghost_depth = kGhostDepth;
  Array2D<double> node_x;
  Array2D<double> node_y;

  BlockGrid() = default;
  BlockGrid(int ni_, int nj_, int ghost = kGhostDepth)
      : ni(ni_), nj(nj_), ghost_depth(ghost),
        node_x(-ghost, ni_ + 1 + ghost, -ghost, nj_ + 1 + ghost),
        node_y(-ghost, ni_ + 1 + ghost, -ghost, nj_ + 1 + ghost) {}
};

struct Face {
  double area = 0.0;  // edge length times unit depth
  double nx = 0.0;
  double ny = 0.0;
};

// Finite-volume metrics for every cell of the ghost frame. i_faces(i, j) is
// the west face of cell (i, j) with its normal pointing toward +i; j_faces(i, j)
// is the south face with its normal pointing toward +j.
struct BlockGeometry {
  int ni = 0;
  int nj = 0;
  int ghost_depth = kGhostDepth;
  Array2D<double> volume;
  Array2D<double> center_x;
  Array2D<double> center_y;
  Array2D<Face> i_faces;
  Array2D<Face> j_faces;
};

namespace detail {

inline void extrapolate_ghost_nodes(BlockGrid& g) {
  const int gd = g.ghost_depth;
  auto fill = [&](Array2D<double>& a) {
    // ghost columns are rigid copies of the edge column shifted along the
    // wall, so they stay untangled however the column spacing varies
    const double west = a(1, 0) - a(0, 0);
    const double east = a(g.ni, 0) - a(g.ni - 1, 0);
    for (int j = 0; j <= g.nj; ++j) {
      for (int i = -1; i >= -gd; --i) a(i, j) = a(i + 1, j) - west;
      for (int i = g.ni + 1; i <= g.ni + gd; ++i) a(i, j) = a(i - 1, j) + east;
    }
    for (int i = -gd; i <= g.ni + gd; ++i) {
      for (int j = -1; j >= -gd; --j) a(i, j) = 2.0 * a(i, j + 1) - a(i, j + 2);
      for (int j = g.nj + 1; j <= g.nj + gd; ++j) a(i, j) = 2.0 * a(i, j - 1) - a(i, j - 2);
    }
  };
  fill(g.node_x);
  fill(g.node_y);
}

inline void check_monotone(const BlockGrid& g) {
  for (int j = 0; j <= g.nj; ++j)
    for (int i = 0; i < g.ni; ++i)
      if (!(g.node_x(i + 1, j) > g.node_x(i, j)))
        throw MeshError("grid tangled along i at node (" + std::to_string(i) + ", " + std::to_string(j) + ")");
  for (int i = 0; i <= g.ni; ++i)
    for (int j = 0; j < g.nj; ++j)
      if (!(g.node_y(i, j + 1) > g.node_y(i, j)))
        throw MeshError("grid tangled along j at node (" + std::to_string(i) + ", " + std::to_string(j) + ")");
}

inline Face make_face(double x0, double y0, double x1, double y1, bool rotate_clockwise) {
  const double tx = x1 - x0;
  const double ty = y1 - y0;
  const double len = std::hypot(tx, ty);
  Face f;
  f.area = len;
  if (rotate_clockwise) {
    f.nx = ty / len;
    f.ny = -tx / len;
  } else {
    f.nx = -ty / len;
    f.ny = tx / len;
  }
  return f;
}

}  // namespace detail

inline BlockGrid build_cartesian_grid(int ni, int nj, double x_extent, double y_extent) {
  if (ni < 1 || nj < 1) throw MeshError("cartesian grid: ni and nj must be >= 1");
  if (!(x_extent > 0.0) || !(y_extent > 0.0)) throw MeshError("cartesian grid: extents must be positive");
  BlockGrid g(ni, nj);
  for (int j = 0; j <= nj; ++j) {
    for (int i = 0; i <= ni; ++i) {
      g.node_x(i, j) = x_extent * (static_cast<double>(i) / ni);
      g.node_y(i, j) = y_extent * (static_cast<double>(j) / nj);
    }
  }
  detail::extrapolate_ghost_nodes(g);
  return g;
}

// Flat inlet section followed by a single compression ramp. The lower boundary
// follows the wall, the upper boundary is flat at `height`, and each i-line is
// distributed uniformly between them. Nodes are uniform in x over the whole
// length, so the ramp corner may fall inside a cell.
inline BlockGrid build_ramp_grid(int ni, int nj, double ramp_angle_deg, double inlet_length, double ramp_length,
                                 double height) {
  if (ni < 1 || nj < 1) throw MeshError("ramp grid: ni and nj must be >= 1");
  if (!(ramp_angle_deg >= 0.0)) throw MeshError("ramp grid: angle must be non-negative");
  if (!(ramp_angle_deg < 45.0)) throw MeshError("ramp grid: angle must be below 45 degrees");
  if (!(inlet_length > 0.0) || !(ramp_length > 0.0) || !(height > 0.0))
    throw MeshError("ramp grid: lengths must be positive");
  const double slope = std::tan(ramp_angle_deg * std::numbers::pi / 180.0);
  const double length = inlet_length + ramp_length;
  if (!(height > slope * ramp_length)) throw MeshError("ramp grid: ramp rises above the upper boundary");

  BlockGrid g(ni, nj);
  for (int i = 0; i <= ni; ++i) {
    const double x = length * (static_cast<double>(i) / ni);
    const double y_wall = x > inlet_length ? (x - inlet_length) * slope : 0.0;
    for (int j = 0; j <= nj; ++j) {
      g.node_x(i, j) = x;
      g.node_y(i, j) = y_wall + (height - y_wall) * (static_cast<double>(j) / nj);
    }
  }
  detail::extrapolate_ghost_nodes(g);
  detail::check_monotone(g);
  return g;
}

inline BlockGeometry compute_metrics(const BlockGrid& grid) {
  const int gd = grid.ghost_depth;
  if (grid.ni < 1 || grid.nj < 1) throw MeshError("metrics: empty grid");
  if (gd < 2) throw MeshError("metrics: ghost depth must be >= 2");
  const auto& X = grid.node_x;
  const auto& Y = grid.node_y;

  BlockGeometry m;
  m.ni = grid.ni;
  m.nj = grid.nj;
  m.ghost_depth = gd;
  m.volume = Array2D<double>(-gd, grid.ni + gd, -gd, grid.nj + gd);
  m.center_x = m.volume;
  m.center_y = m.volume;
  m.i_faces = Array2D<Face>(-gd, grid.ni + gd + 1, -gd, grid.nj + gd);
  m.j_faces = Array2D<Face>(-gd, grid.ni + gd, -gd, grid.nj + gd + 1);

  for (int j = -gd; j < grid.nj + gd; ++j) {
    for (int i = -gd; i < grid.ni + gd; ++i) {
      // counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1)
      const double x0 = X(i, j), y0 = Y(i, j);
      const double x1 = X(i + 1, j), y1 = Y(i + 1, j);
      const double x2 = X(i + 1, j + 1), y2 = Y(i + 1, j + 1);
      const double x3 = X(i, j + 1), y3 = Y(i, j + 1);
      const double area = 0.5 * ((x0 * y1 - x1 * y0) + (x1 * y2 - x2 * y1) + (x2 * y3 - x3 * y2) + (x3 * y0 - x0 * y3));
      if (!(area > 0.0)) {
        std::ostringstream os;
        os << "non-positive cell volume " << area << " at cell (" << i << ", " << j << ")";
        throw MeshError(os.str());
      }
      m.volume(i, j) = area;
      m.center_x(i, j) = 0.25 * (x0 + x1 + x2 + x3);
      m.center_y(i, j) = 0.25 * (y0 + y1 + y2 + y3);
    }
  }
  for (int j = -gd; j < grid.nj + gd; ++j)
    for (int i = -gd; i <= grid.ni + gd; ++i)
      m.i_faces(i, j) = detail::make_face(X(i, j), Y(i, j), X(i, j + 1), Y(i, j + 1), true);
  for (int j = -gd; j <= grid.nj + gd; ++j)
    for (int i = -gd; i < grid.ni + gd; ++i)
      m.j_faces(i, j) = detail::make_face(X(i, j), Y(i, j), X(i + 1, j), Y(i + 1, j), false);
  return m;
}

// Plain-text dump: header "ni nj ghost_depth", then every node of the ghost
// frame row by row (j outer, i inner) as "x y".
inline void write_grid(std::ostream& os, const BlockGrid& g) {
  os << g.ni << ' ' << g.nj << ' ' << g.ghost_depth << '\n';
  os << std::setprecision(17);
  for (int j = g.node_x.j_lo(); j < g.node_x.j_hi(); ++j)
    for (int i = g.node_x.i_lo(); i < g.node_x.i_hi(); ++i) os << g.node_x(i, j) << ' ' << g.node_y(i, j) << '\n';
}

}  // namespace hfv
