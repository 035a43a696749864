#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfv/executor.hpp"
#include "hfv/harness/cases.hpp"
#include "hfv/harness/config.hpp"
#include "hfv/mms.hpp"

namespace hfv::harness {

struct ObliqueShock {
  double beta = 0.0;  // shock angle, radians
  double pressure_ratio = 0.0;
  double density_ratio = 0.0;
  double mach_downstream = 0.0;
};

// Weak attached solution of the theta-beta-M relation, found by bisection
// between the Mach angle and the angle of maximum deflection.
inline ObliqueShock oblique_shock(double mach, double theta_rad, double gamma) {
  auto deflection = [&](double b) {
    const double s = std::sin(b);
    return std::atan(2.0 / std::tan(b) * (mach * mach * s * s - 1.0) / (mach * mach * (gamma + std::cos(2.0 * b)) + 2.0));
  };
  double lo = std::asin(1.0 / mach);
  // locate the maximum deflection by golden-section search
  double a = lo, c = 0.5 * std::numbers::pi;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (c - a) * 0.381966011250105;
    const double m2 = a + (c - a) * 0.618033988749895;
    if (deflection(m1) < deflection(m2)) a = m1;
    else c = m2;
  }
  double hi = 0.5 * (a + c);
  if (theta_rad > deflection(hi)) throw std::invalid_argument("oblique shock: deflection exceeds the attached limit");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (deflection(mid) < theta_rad) lo = mid;
    else hi = mid;
  }
  ObliqueShock s;
  s.beta = 0.5 * (lo + hi);
  const double mn1 = mach * std::sin(s.beta);
  s.pressure_ratio = 1.0 + 2.0 * gamma / (gamma + 1.0) * (mn1 * mn1 - 1.0);
  s.density_ratio = (gamma + 1.0) * mn1 * mn1 / ((gamma - 1.0) * mn1 * mn1 + 2.0);
  const double mn2 =
      std::sqrt((1.0 + 0.5 * (gamma - 1.0) * mn1 * mn1) / (gamma * mn1 * mn1 - 0.5 * (gamma - 1.0)));
  s.mach_downstream = mn2 / std::sin(s.beta - theta_rad);
  return s;
}

struct VerifyResult {
  std::string suite;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string comparison;  // how measured is compared with threshold
  std::vector<std::string> details;

  std::string summary() const {
    std::ostringstream os;
    os << suite << ": " << (passed ? "PASS" : "FAIL") << " measured=" << measured << " " << comparison
       << " threshold=" << threshold;
    return os.str();
  }
};

inline std::string default_suite_config(const std::string& suite) {
  if (suite == "mms")
    return "[case]\nkind = cartesian_mms\n[grid]\nni = 20\nnj = 20\n[solver]\nscheme = rk4\ncfl = 0.8\nsteps = 200000\n";
  if (suite == "shock")
    return "[case]\nkind = ramp_inlet\n[grid]\nni = 160\nnj = 80\nramp_angle = 10\n[solver]\nscheme = rk4\ncfl = 0.8\n"
           "steps = 1500\n";
  if (suite == "couette")
    return "[case]\nkind = couette\n[grid]\nni = 4\nnj = 16\n[solver]\nmode = ns\nscheme = rk4\ncfl = 0.8\n"
           "steps = 20000\n";
  if (suite == "decomp")
    return "[case]\nkind = ramp_inlet\n[grid]\nni = 120\nnj = 40\nramp_angle = 10\n[solver]\nscheme = rk4\n"
           "steps = 50\n";
  throw ConfigError("unknown suite '" + suite + "' (expected mms, shock, couette or decomp)");
}

namespace detail {

// March until the largest per-step relative density change drops below tol,
// or the step budget runs out. Returns the steps taken.
inline int march_to_steady(SerialSolver& solver, int max_steps, double tol) {
  const auto& U = solver.block().U;
  const int ni = solver.block().ni, nj = solver.block().nj;
  std::vector<double> prev(static_cast<std::size_t>(ni) * static_cast<std::size_t>(nj));
  int n = 0;
  while (n < max_steps) {
    for (int j = 0; j < nj; ++j)
      for (int i = 0; i < ni; ++i) prev[static_cast<std::size_t>(j * ni + i)] = U(i, j).rho();
    solver.step();
    ++n;
    if (n % 10 != 0) continue;
    double change = 0.0;
    for (int j = 0; j < nj; ++j)
      for (int i = 0; i < ni; ++i)
        change = std::max(change, std::abs(U(i, j).rho() - prev[static_cast<std::size_t>(j * ni + i)]) / U(i, j).rho());
    if (change < tol) break;
  }
  return n;
}

}  // namespace detail

// Steady MMS solves on ni, 2 ni, 4 ni; order from the least-squares slope of
// log(L2 density error) against log(h).
inline VerifyResult verify_mms(const CaseConfig& base, double min_order = 1.8) {
  VerifyResult res;
  res.suite = "mms";
  res.threshold = min_order;
  res.comparison = ">=";
  const ManufacturedSolution mms;
  std::vector<double> lh, le;
  for (int level = 0; level < 3; ++level) {
    CaseConfig c = base;
    c.kind = CaseKind::cartesian_mms;
    c.ni = base.ni << level;
    c.nj = base.nj << level;
    const CaseSetup setup = build_case(c);
    SerialSolver solver(setup);
    const int steps = detail::march_to_steady(solver, c.steps, 1e-13);
    double sum = 0.0, vol = 0.0;
    const GeometryView g = solver.geometry();
    for (int j = 0; j < c.nj; ++j)
      for (int i = 0; i < c.ni; ++i) {
        const double e = solver.block().U(i, j).rho() - mms.primitive(g.center_x(i, j), g.center_y(i, j)).rho;
        sum += e * e * g.volume(i, j);
        vol += g.volume(i, j);
      }
    const double err = std::sqrt(sum / vol);
    const double h = 1.0 / c.ni;
    lh.push_back(std::log(h));
    le.push_back(std::log(err));
    std::ostringstream os;
    os << "grid " << c.ni << "x" << c.nj << " steps " << steps << " L2(rho error) " << err;
    res.details.push_back(os.str());
  }
  const double mx = (lh[0] + lh[1] + lh[2]) / 3.0, my = (le[0] + le[1] + le[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < 3; ++k) {
    sxy += (lh[k] - mx) * (le[k] - my);
    sxx += (lh[k] - mx) * (lh[k] - mx);
  }
  res.measured = sxy / sxx;
  res.passed = res.measured >= min_order;
  return res;
}

struct ShockMeasurement {
  double pressure_ratio = 0.0;
  double mach = 0.0;
  int cells = 0;
};

// Average p/p1 and Mach over cells above the ramp between 20% and 70% of the
// way from the wall to the exact shock, at 40-90% of the ramp length.
inline ShockMeasurement measure_ramp_shock(const CaseConfig& c, const Array2D<ConservedState>& sol,
                                           const BlockGeometry& geom, double shock_angle) {
  const double slope = std::tan(c.ramp_angle * std::numbers::pi / 180.0);
  const double p1 = inflow_state(c).p;
  ShockMeasurement m;
  for (int j = 0; j < c.nj; ++j)
    for (int i = 0; i < c.ni; ++i) {
      const double xr = geom.center_x(i, j) - c.inlet_length;
      if (xr < 0.4 * c.ramp_length || xr > 0.9 * c.ramp_length) continue;
      const double y_wall = xr * slope;
      const double y_shock = xr * std::tan(shock_angle);
      const double f = (geom.center_y(i, j) - y_wall) / (y_shock - y_wall);
      if (f < 0.2 || f > 0.7) continue;
      const PrimitiveState w = primitive_from_conserved(sol(i, j), c.gas);
      m.pressure_ratio += w.p / p1;
      m.mach += mach_number(w, c.gas);
      ++m.cells;
    }
  if (m.cells == 0) throw std::runtime_error("shock: no cells in the measurement band");
  m.pressure_ratio /= m.cells;
  m.mach /= m.cells;
  return m;
}

inline VerifyResult verify_shock(const CaseConfig& c, double tolerance = 0.02) {
  VerifyResult res;
  res.suite = "shock";
  res.threshold = tolerance;
  res.comparison = "<=";
  const ObliqueShock exact = oblique_shock(c.mach, c.ramp_angle * std::numbers::pi / 180.0, c.gas.gamma);
  const CaseSetup setup = build_case(c);
  SerialSolver solver(setup);
  const int steps = detail::march_to_steady(solver, c.steps, 1e-9);
  const ShockMeasurement m = measure_ramp_shock(c, solver.solution(), *setup.geometry, exact.beta);
  const double ep = std::abs(m.pressure_ratio / exact.pressure_ratio - 1.0);
  const double em = std::abs(m.mach / exact.mach_downstream - 1.0);
  res.measured = std::max(ep, em);
  res.passed = res.measured <= tolerance;
  std::ostringstream os;
  os << "steps " << steps << " cells " << m.cells << " shock angle " << exact.beta * 180.0 / std::numbers::pi
     << " deg; p2/p1 " << m.pressure_ratio << " vs " << exact.pressure_ratio << " (" << ep << "); M2 " << m.mach
     << " vs " << exact.mach_downstream << " (" << em << ")";
  res.details.push_back(os.str());
  return res;
}

// Linear velocity profile between a fixed south wall and a moving north wall.
inline VerifyResult verify_couette(const CaseConfig& c, double tolerance = 1e-3) {
  VerifyResult res;
  res.suite = "couette";
  res.threshold = tolerance;
  res.comparison = "<=";
  const CaseSetup setup = build_case(c);
  SerialSolver solver(setup);
  const int steps = detail::march_to_steady(solver, c.steps, 1e-12);
  const GeometryView g = solver.geometry();
  const double uw = c.north_wall_speed - c.south_wall_speed;
  double worst = 0.0;
  for (int j = 0; j < c.nj; ++j)
    for (int i = 0; i < c.ni; ++i) {
      const PrimitiveState w = primitive_from_conserved(solver.block().U(i, j), c.gas);
      const double exact = c.south_wall_speed + uw * g.center_y(i, j) / c.y_extent;
      worst = std::max(worst, std::abs(w.u - exact) / std::abs(uw));
    }
  res.measured = worst;
  res.passed = worst <= tolerance;
  res.details.push_back("steps " + std::to_string(steps) + " time " + std::to_string(solver.time()));
  return res;
}

// Same case on several partitions; largest difference against one worker.
inline VerifyResult verify_decomposition(const CaseConfig& c, double tolerance = 1e-12) {
  VerifyResult res;
  res.suite = "decomp";
  res.threshold = tolerance;
  res.comparison = "<";
  const CaseSetup setup = build_case(c);
  const std::vector<WorkerSpec> pools{{1, 0, 1.0, 1.0}, {2, 0, 1.0, 1.0}, {1, 4, 8.0, 8.0}, {8, 0, 1.0, 1.0}};
  const HeteroResult ref = run_heterogeneous(setup, pools[0], c.steps);
  double worst = 0.0;
  for (std::size_t k = 1; k < pools.size(); ++k) {
    const HeteroResult r = run_heterogeneous(setup, pools[k], c.steps);
    const double d = max_relative_difference(ref.solution, r.solution);
    worst = std::max(worst, d);
    std::ostringstream os;
    os << "G=" << pools[k].G << " C=" << pools[k].C << " W=" << pools[k].W << " widths";
    for (int w : r.partition.widths()) os << ' ' << w;
    os << " max relative difference " << d;
    res.details.push_back(os.str());
  }
  res.measured = worst;
  res.passed = worst < tolerance;
  return res;
}

inline VerifyResult run_verify_suite(const std::string& suite, const CaseConfig& c) {
  if (suite == "mms") return verify_mms(c);
  if (suite == "shock") return verify_shock(c);
  if (suite == "couette") return verify_couette(c);
  if (suite == "decomp") return verify_decomposition(c);
  throw ConfigError("unknown suite '" + suite + "' (expected mms, shock, couette or decomp)");
}

}  // namespace hfv::harness
