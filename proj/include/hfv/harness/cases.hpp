#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include "hfv/boundary.hpp"
#include "hfv/emulation.hpp"
#include "hfv/executor.hpp"
#include "hfv/harness/config.hpp"
#include "hfv/mesh.hpp"
#include "hfv/mms.hpp"

namespace hfv::harness {

inline BlockGrid build_grid(const CaseConfig& c) {
  if (c.kind == CaseKind::ramp_inlet)
    return build_ramp_grid(c.ni, c.nj, c.ramp_angle, c.inlet_length, c.ramp_length, c.height);
  return build_cartesian_grid(c.ni, c.nj, c.x_extent, c.y_extent);
}

inline PrimitiveState inflow_state(const CaseConfig& c) {
  return freestream(c.mach, c.pressure, c.temperature, c.gas, c.flow_angle * std::numbers::pi / 180.0);
}

inline BoundaryKind make_boundary(const CaseConfig& c, const std::string& name, double wall_speed) {
  if (name == "supersonic_inflow") return SupersonicInflow{inflow_state(c)};
  if (name == "supersonic_outflow") return SupersonicOutflow{};
  if (name == "slip_wall") return SlipWall{};
  if (name == "no_slip_adiabatic_wall") return NoSlipAdiabaticWall{wall_speed, 0.0};
  if (name == "manufactured") {
    const ManufacturedSolution mms;
    return ManufacturedDirichlet{[mms](double x, double y) { return mms.primitive(x, y); }};
  }
  throw ConfigError("invalid boundary kind '" + name + "'");
}

// Quiescent reference state of the viscous channel: unit density and sound speed.
inline PrimitiveState couette_rest_state(const GasModel& gas) { return {1.0, 0.0, 0.0, 1.0 / gas.gamma}; }

inline CaseSetup build_case(const CaseConfig& c) {
  CaseSetup s;
  s.name = c.name;
  s.geometry = std::make_shared<const BlockGeometry>(compute_metrics(build_grid(c)));
  s.residual.gas = c.gas;
  s.residual.mode = c.mode;
  s.residual.muscl = {c.epsilon, c.kappa};
  s.scheme = ButcherTableau::by_name(c.scheme);
  s.cfl = c.cfl;
  s.fixed_dt = c.dt;
  for (int e = 0; e < 4; ++e) {
    const double speed = e == 2 ? c.south_wall_speed : e == 3 ? c.north_wall_speed : 0.0;
    s.boundary.edges[static_cast<std::size_t>(e)] = make_boundary(c, c.boundary[static_cast<std::size_t>(e)], speed);
  }

  switch (c.kind) {
    case CaseKind::ramp_inlet: {
      const PrimitiveState inf = inflow_state(c);
      s.initial = [inf](double, double) { return inf; };
      break;
    }
    case CaseKind::cartesian_mms: {
      const ManufacturedSolution mms;
      const GasModel gas = c.gas;
      s.initial = [mms](double x, double y) { return mms.primitive(x, y); };
      s.residual.source = [mms, gas](double x, double y) { return mms_source(mms, x, y, gas); };
      break;
    }
    case CaseKind::sod_tube: {
      const double mid = 0.5 * c.x_extent;
      s.initial = [mid](double x, double) {
        return x < mid ? PrimitiveState{1.0, 0.0, 0.0, 1.0} : PrimitiveState{0.125, 0.0, 0.0, 0.1};
      };
      break;
    }
    case CaseKind::couette: {
      const PrimitiveState rest = couette_rest_state(c.gas);
      s.initial = [rest](double, double) { return rest; };
      break;
    }
  }
  return s;
}

// Kernel timed by the slowdown calibration: one interior stage (limiter pass,
// residual, stage update) over the whole case grid.
struct InteriorKernel {
  std::function<void()> run;
  long cells = 0;
};

inline InteriorKernel make_interior_kernel(const CaseSetup& setup) {
  struct State {
    CaseSetup setup;
    GeometryView geom;
    Block base, stage;
    LimiterField limiters;
    ResidualWorkspace ws;
    std::vector<Array2D<FluxVector>> K;
  };
  auto st = std::make_shared<State>();
  st->setup = setup;
  st->geom = GeometryView(*setup.geometry);
  st->base = Block(0, setup.ni(), setup.nj());
  fill_block(st->base, st->geom, setup.residual.gas, setup.initial);
  apply_boundary(st->base, st->geom, setup.boundary, setup.residual.gas);
  st->stage = st->base;
  st->K.resize(1);
  const double dt = 1e-3 * stable_dt(st->base, st->geom, 1.0, setup.residual.gas, setup.residual.mode);
  InteriorKernel k;
  k.cells = static_cast<long>(setup.ni()) * setup.nj();
  k.run = [st, dt] {
    const double one = 1.0;
    compute_limiters(st->base, st->limiters);
    residual(st->base, st->geom, st->limiters, st->setup.residual, st->K[0], st->ws);
    stage_update(st->base, st->K, &one, 1, dt, st->geom, st->stage);
  };
  return k;
}

inline EmulationMode resolve_emulation_mode(const CaseConfig& c) {
  return c.emulation == "auto" ? auto_emulation_mode(c.workers.workers()) : emulation_mode_from_name(c.emulation);
}

inline SlowdownCalibration calibrate_for_case(const CaseConfig& c, const CaseSetup& setup) {
  const EmulationMode mode = resolve_emulation_mode(c);
  const InteriorKernel k = make_interior_kernel(setup);
  SlowdownCalibration cal = calibrate_slowdown(c.workers.r_gc, k.run, k.cells, mode, c.pace_factor);
  cal.boundary_factor = c.boundary_factor;
  return cal;
}

}  // namespace hfv::harness
