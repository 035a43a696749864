#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfv/array2d.hpp"
#include "hfv/block.hpp"
#include "hfv/residual.hpp"
#include "hfv/state.hpp"

namespace hfv {

// Explicit Runge-Kutta coefficients. a is row-major s x s and strictly lower
// triangular.
struct ButcherTableau {
  std::string name;
  int s = 0;
  std::vector<double> a;
  std::vector<double> b;

  double coeff(int i, int j) const { return a[static_cast<std::size_t>(i * s + j)]; }

  void validate() const {
    if (s < 1) throw std::invalid_argument("tableau: stage count must be >= 1");
    if (a.size() != static_cast<std::size_t>(s * s) || b.size() != static_cast<std::size_t>(s))
      throw std::invalid_argument("tableau: coefficient arrays do not match the stage count");
    for (int i = 0; i < s; ++i)
      for (int j = i; j < s; ++j)
        if (coeff(i, j) != 0.0) throw std::invalid_argument("tableau: a_ij must vanish for i <= j (explicit)");
    double sum = 0.0;
    for (double w : b) sum += w;
    if (std::abs(sum - 1.0) > 1e-15) throw std::invalid_argument("tableau: weights must sum to 1");
  }

  static ButcherTableau heun2() { return {"rk2", 2, {0.0, 0.0, 1.0, 0.0}, {0.5, 0.5}}; }

  static ButcherTableau classical4() {
    return {"rk4", 4,
            {0.0, 0.0, 0.0, 0.0,
             0.5, 0.0, 0.0, 0.0,
             0.0, 0.5, 0.0, 0.0,
             0.0, 0.0, 1.0, 0.0},
            {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}};
  }

  static ButcherTableau by_name(const std::string& n) {
    if (n == "rk2") return heun2();
    if (n == "rk4") return classical4();
    throw std::invalid_argument("unknown scheme '" + n + "' (expected rk2 or rk4)");
  }
};

// out = base - dt / vol * sum_m coef[m] * K[m] over interior cells, for the
// first `count` stage residuals. Zero coefficients are skipped so a stage
// only reads residuals it depends on. Every worker and the serial path use
// this one routine, keeping the arithmetic order fixed.
inline void stage_update(const Block& base, const std::vector<Array2D<FluxVector>>& K, const double* coef,
                         int count, double dt, GeometryView geom, Block& out) {
  for (int j = 0; j < base.nj; ++j) {
    for (int i = 0; i < base.ni; ++i) {
      FluxVector acc{};
      for (int m = 0; m < count; ++m)
        if (coef[m] != 0.0) acc += coef[m] * K[static_cast<std::size_t>(m)](i, j);
      const double scale = dt / geom.volume(i, j);
      ConservedState q = base.U(i, j);
      for (std::size_t k = 0; k < kNumVars; ++k) q[k] -= scale * acc[k];
      out.U(i, j) = q;
    }
  }
}

// Interior validity after a stage; the error names the stage and global cell.
inline void validate_stage(const Block& b, GeometryView geom, const GasModel& gas, int stage) {
  for (int j = 0; j < b.nj; ++j) {
    for (int i = 0; i < b.ni; ++i) {
      try {
        (void)primitive_from_conserved(b.U(i, j), gas);
      } catch (const InvalidStateError& e) {
        throw InvalidStateError("RK stage " + std::to_string(stage) + ": " + e.what(), geom.offset() + i, j);
      }
    }
  }
}

// Residual callback: refresh the stage state's ghosts, then fill R.
using ResidualFn = std::function<void(Block& stage, Array2D<FluxVector>& R)>;

// One explicit RK step of dU/dt = -R(U)/vol. Returns the number of residual
// evaluations, which equals the stage count.
inline int rk_advance(Block& U, const ResidualFn& residual_fn, double dt, const ButcherTableau& tab,
                      GeometryView geom, const GasModel& gas) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk_advance: dt must be positive");
  std::vector<Array2D<FluxVector>> K(static_cast<std::size_t>(tab.s));
  Block stage = U;
  int calls = 0;
  for (int i = 0; i < tab.s; ++i) {
    if (i > 0) {
      stage_update(U, K, &tab.a[static_cast<std::size_t>(i * tab.s)], i, dt, geom, stage);
      validate_stage(stage, geom, gas, i);
    }
    residual_fn(stage, K[static_cast<std::size_t>(i)]);
    ++calls;
  }
  stage_update(U, K, tab.b.data(), tab.s, dt, geom, U);
  validate_stage(U, geom, gas, tab.s);
  return calls;
}

// Largest stable step over the interior: cfl * vol / sum_faces (|Vn| + a) ds.
// In viscous mode the diffusive spectral radius is added to the denominator.
inline double stable_dt(const Block& b, GeometryView geom, double cfl, const GasModel& gas,
                        FlowMode mode = FlowMode::euler) {
  if (!(cfl > 0.0)) throw std::invalid_argument("stable_dt: cfl must be positive");
  double dt = std::numeric_limits<double>::infinity();
  for (int j = 0; j < b.nj; ++j) {
    for (int i = 0; i < b.ni; ++i) {
      const PrimitiveState w = primitive_from_conserved(b.U(i, j), gas, geom.offset() + i, j);
      const double a = speed_of_sound(w, gas);
      const Face* faces[4] = {&geom.i_face(i, j), &geom.i_face(i + 1, j), &geom.j_face(i, j), &geom.j_face(i, j + 1)};
      double lam = 0.0;
      for (const Face* f : faces) lam += (std::abs(normal_velocity(w, f->nx, f->ny)) + a) * f->area;
      const double vol = geom.volume(i, j);
      if (mode == FlowMode::navier_stokes && gas.mu > 0.0) {
        const double si = 0.5 * (faces[0]->area + faces[1]->area);
        const double sj = 0.5 * (faces[2]->area + faces[3]->area);
        const double coef = std::max(4.0 / 3.0, gas.gamma) * gas.mu / (gas.Pr * w.rho);
        lam += 4.0 * coef * (si * si + sj * sj) / vol;
      }
      dt = std::min(dt, vol / lam);
    }
  }
  return cfl * dt;
}

}  // namespace hfv
