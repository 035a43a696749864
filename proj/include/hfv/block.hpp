#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>

#include "hfv/array2d.hpp"
#include "hfv/mesh.hpp"
#include "hfv/state.hpp"

namespace hfv {

enum class Edge { west = 0, east = 1, south = 2, north = 3 };

inline constexpr std::array<Edge, 4> kAllEdges{Edge::west, Edge::east, Edge::south, Edge::north};

inline const char* edge_name(Edge e) {
  switch (e) {
    case Edge::west: return "west";
    case Edge::east: return "east";
    case Edge::south: return "south";
    case Edge::north: return "north";
  }
  return "?";
}

// Raised when ghost data that should have arrived from a neighbour is missing.
class SynchronizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One slab of the global structured grid: interior columns [0, ni) map to
// global columns [i_begin, i_begin + ni). Rows are never split.
struct Block {
  int i_begin = 0;
  int ni = 0;
  int nj = 0;
  Array2D<ConservedState> U;
  // Set on connected edges once the interior changes; cleared when the
  // neighbour's columns have been unpacked into the ghost layer.
  std::array<bool, 4> ghosts_pending{};

  Block() = default;
  Block(int i_begin_, int ni_, int nj_)
      : i_begin(i_begin_), ni(ni_), nj(nj_),
        U(-kGhostDepth, ni_ + kGhostDepth, -kGhostDepth, nj_ + kGhostDepth) {}

  void require_ghosts() const {
    for (Edge e : kAllEdges)
      if (ghosts_pending[static_cast<int>(e)])
        throw SynchronizationError(std::string("connected ") + edge_name(e) + " edge of block at column " +
                                   std::to_string(i_begin) + " has no delivered ghost data");
  }
};

// Read-only window onto the global geometry for a block starting at a given
// global column. All blocks share one BlockGeometry.
class GeometryView {
 public:
  GeometryView() = default;
  explicit GeometryView(const BlockGeometry& g, int i_offset = 0) : g_(&g), off_(i_offset) {}

  double volume(int i, int j) const { return g_->volume(i + off_, j); }
  double center_x(int i, int j) const { return g_->center_x(i + off_, j); }
  double center_y(int i, int j) const { return g_->center_y(i + off_, j); }
  const Face& i_face(int i, int j) const { return g_->i_faces(i + off_, j); }
  const Face& j_face(int i, int j) const { return g_->j_faces(i + off_, j); }
  int offset() const { return off_; }
  const BlockGeometry& global() const { return *g_; }

 private:
  const BlockGeometry* g_ = nullptr;
  int off_ = 0;
};

// Initialise every cell of the ghost frame from a pointwise primitive field.
inline void fill_block(Block& b, GeometryView geom, const GasModel& gas,
                       const std::function<PrimitiveState(double, double)>& field) {
  for (int j = b.U.j_lo(); j < b.U.j_hi(); ++j)
    for (int i = b.U.i_lo(); i < b.U.i_hi(); ++i)
      b.U(i, j) = conserved_from_primitive(field(geom.center_x(i, j), geom.center_y(i, j)), gas);
}

}  // namespace hfv
