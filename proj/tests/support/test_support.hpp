#pragma once

#include <cstdint>
#include <random>

#include "hfv/hfv.hpp"

namespace testsupport {

inline hfv::PrimitiveState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rho(0.1, 5.0), vel(-3.0, 3.0), p(0.1, 10.0);
  return {rho(rng), vel(rng), vel(rng), p(rng)};
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Uniform block (ghosts included) over a geometry.
inline hfv::Block uniform_block(const hfv::BlockGeometry& g, const hfv::PrimitiveState& w, const hfv::GasModel& gas) {
  hfv::Block b(0, g.ni, g.nj);
  hfv::fill_block(b, hfv::GeometryView(g), gas, [w](double, double) { return w; });
  return b;
}

}  // namespace testsupport
