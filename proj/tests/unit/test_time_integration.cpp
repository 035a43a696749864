#include <gtest/gtest.h>

#include <cmath>

#include "hfv/hfv.hpp"
#include "test_support.hpp"

using namespace hfv;

namespace {

// One unit cell carrying a state whose every component decays as exp(-t).
struct DecayProblem {
  BlockGeometry geom = compute_metrics(build_cartesian_grid(1, 1, 1.0, 1.0));
  GasModel gas;
  Block U{0, 1, 1};

  DecayProblem() { U.U(0, 0) = {{1.0, 0.0, 0.0, 2.5}}; }

  ResidualFn decay() const {
    return [](Block& stage, Array2D<FluxVector>& R) {
      R = Array2D<FluxVector>(0, 1, 0, 1);
      R(0, 0) = stage.U(0, 0);
    };
  }

  double run(const ButcherTableau& tab, double dt, double t_end) {
    const int steps = static_cast<int>(std::lround(t_end / dt));
    for (int n = 0; n < steps; ++n) rk_advance(U, decay(), dt, tab, GeometryView(geom), gas);
    return U.U(0, 0).rho();
  }
};

double observed_order(const ButcherTableau& tab) {
  double err[3];
  const double dts[3] = {0.1, 0.05, 0.025};
  for (int k = 0; k < 3; ++k) err[k] = std::abs(DecayProblem{}.run(tab, dts[k], 1.0) - std::exp(-1.0));
  return 0.5 * (std::log2(err[0] / err[1]) + std::log2(err[1] / err[2]));
}

}  // namespace

TEST(RungeKutta, ZeroResidualIsFixedPoint) {
  DecayProblem p;
  const ConservedState before = p.U.U(0, 0);
  auto zero = [](Block&, Array2D<FluxVector>& R) {
    R = Array2D<FluxVector>(0, 1, 0, 1);
    R(0, 0) = FluxVector{};
  };
  for (const auto& tab : {ButcherTableau::heun2(), ButcherTableau::classical4()}) {
    rk_advance(p.U, zero, 0.3, tab, GeometryView(p.geom), p.gas);
    EXPECT_EQ(p.U.U(0, 0), before);
  }
}

TEST(RungeKutta, SingleStepOfExponentialDecay) {
  EXPECT_NEAR(DecayProblem{}.run(ButcherTableau::classical4(), 0.1, 0.1), 0.9048375, 5e-8);
  EXPECT_NEAR(DecayProblem{}.run(ButcherTableau::heun2(), 0.1, 0.1), 0.905, 1e-15);
}

TEST(RungeKutta, UpdateScalesWithCellVolume) {
  DecayProblem p;
  p.geom = compute_metrics(build_cartesian_grid(1, 1, 2.0, 1.0));
  // R = U with |cell| = 2 halves the decay rate
  EXPECT_NEAR(p.run(ButcherTableau::heun2(), 0.1, 0.1), 1.0 - 0.05 + 0.00125, 1e-15);
}

TEST(RungeKutta, ObservedTemporalOrder) {
  EXPECT_NEAR(observed_order(ButcherTableau::heun2()), 2.0, 0.1);
  EXPECT_NEAR(observed_order(ButcherTableau::classical4()), 4.0, 0.2);
}

TEST(RungeKutta, ResidualCallsEqualStageCount) {
  for (const auto& tab : {ButcherTableau::heun2(), ButcherTableau::classical4()}) {
    DecayProblem p;
    int calls = 0;
    const ResidualFn base = p.decay();
    auto counting = [&](Block& b, Array2D<FluxVector>& R) {
      ++calls;
      base(b, R);
    };
    EXPECT_EQ(rk_advance(p.U, counting, 0.1, tab, GeometryView(p.geom), p.gas), tab.s);
    EXPECT_EQ(calls, tab.s);
  }
}

TEST(RungeKutta, RejectsNonPositiveStep) {
  DecayProblem p;
  EXPECT_THROW(rk_advance(p.U, p.decay(), 0.0, ButcherTableau::heun2(), GeometryView(p.geom), p.gas),
               std::invalid_argument);
}

TEST(RungeKutta, InvalidStageNamesStage) {
  DecayProblem p;
  // a residual large enough to drive the first stage to negative density
  auto blowup = [](Block& stage, Array2D<FluxVector>& R) {
    R = Array2D<FluxVector>(0, 1, 0, 1);
    R(0, 0) = stage.U(0, 0) * 100.0;
  };
  try {
    rk_advance(p.U, blowup, 0.1, ButcherTableau::classical4(), GeometryView(p.geom), p.gas);
    FAIL() << "expected an invalid state";
  } catch (const InvalidStateError& e) {
    EXPECT_NE(std::string(e.what()).find("RK stage 1"), std::string::npos) << e.what();
    EXPECT_EQ(e.i(), 0);
    EXPECT_EQ(e.j(), 0);
  }
}

TEST(ButcherTableau, ShippedTableausAreExplicitAndConsistent) {
  for (const auto& tab : {ButcherTableau::heun2(), ButcherTableau::classical4()}) {
    EXPECT_NO_THROW(tab.validate());
    double sum = 0.0;
    for (double w : tab.b) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-15);
    for (int i = 0; i < tab.s; ++i)
      for (int j = i; j < tab.s; ++j) EXPECT_EQ(tab.coeff(i, j), 0.0);
  }
  EXPECT_EQ(ButcherTableau::heun2().coeff(1, 0), 1.0);
  EXPECT_EQ(ButcherTableau::by_name("rk4").s, 4);
  EXPECT_THROW(ButcherTableau::by_name("rk3"), std::invalid_argument);
}

TEST(ButcherTableau, ValidationRejectsImplicitAndInconsistent) {
  ButcherTableau implicit{"x", 2, {0.5, 0.0, 1.0, 0.0}, {0.5, 0.5}};
  EXPECT_THROW(implicit.validate(), std::invalid_argument);
  ButcherTableau inconsistent{"x", 2, {0.0, 0.0, 1.0, 0.0}, {0.5, 0.4}};
  EXPECT_THROW(inconsistent.validate(), std::invalid_argument);
  ButcherTableau mismatched{"x", 2, {0.0, 0.0, 1.0}, {0.5, 0.5}};
  EXPECT_THROW(mismatched.validate(), std::invalid_argument);
}

TEST(StableDt, QuiescentUnitCell) {
  const GasModel gas;
  const BlockGeometry g = compute_metrics(build_cartesian_grid(3, 2, 3.0, 2.0));
  const Block b = testsupport::uniform_block(g, {1.0, 0.0, 0.0, 1.0}, gas);
  EXPECT_NEAR(stable_dt(b, GeometryView(g), 1.0, gas), 1.0 / (4.0 * std::sqrt(1.4)), 1e-15);
  EXPECT_NEAR(stable_dt(b, GeometryView(g), 1.0, gas), 0.21129, 5e-6);
  EXPECT_NEAR(stable_dt(b, GeometryView(g), 0.5, gas), 0.5 / (4.0 * std::sqrt(1.4)), 1e-15);
}

TEST(StableDt, HalvingCellsHalvesStep) {
  const GasModel gas;
  const PrimitiveState w{1.2, 0.4, -0.3, 0.8};
  auto dt_on = [&](const BlockGrid& grid) {
    const BlockGeometry g = compute_metrics(grid);
    return stable_dt(testsupport::uniform_block(g, w, gas), GeometryView(g), 0.8, gas);
  };
  EXPECT_NEAR(dt_on(build_ramp_grid(12, 6, 15.0, 0.5, 1.0, 0.75)) / dt_on(build_ramp_grid(12, 6, 15.0, 1.0, 2.0, 1.5)),
              0.5, 1e-12);
  EXPECT_NEAR(dt_on(build_cartesian_grid(24, 12, 2.0, 1.0)) / dt_on(build_cartesian_grid(12, 6, 2.0, 1.0)), 0.5,
              1e-12);
}

TEST(StableDt, MovingGasTakesSmallerStep) {
  const GasModel gas;
  const BlockGeometry g = compute_metrics(build_cartesian_grid(1, 1, 1.0, 1.0));
  const double a = std::sqrt(1.4);
  const Block b = testsupport::uniform_block(g, {1.0, 2.0, 0.0, 1.0}, gas);
  // |Vn| contributes on the two i-faces only
  EXPECT_NEAR(stable_dt(b, GeometryView(g), 1.0, gas), 1.0 / (4.0 * a + 4.0), 1e-15);
}

TEST(StableDt, ViscousTermOnlyShrinksStep) {
  GasModel gas;
  gas.mu = 0.05;
  const BlockGeometry g = compute_metrics(build_cartesian_grid(4, 4, 1.0, 1.0));
  const Block b = testsupport::uniform_block(g, {1.0, 0.1, 0.0, 1.0}, gas);
  const double inviscid = stable_dt(b, GeometryView(g), 1.0, gas, FlowMode::euler);
  const double viscous = stable_dt(b, GeometryView(g), 1.0, gas, FlowMode::navier_stokes);
  EXPECT_LT(viscous, inviscid);
  EXPECT_GT(viscous, 0.0);
}

TEST(StableDt, RejectsZeroCfl) {
  const GasModel gas;
  const BlockGeometry g = compute_metrics(build_cartesian_grid(1, 1, 1.0, 1.0));
  const Block b = testsupport::uniform_block(g, {1.0, 0.0, 0.0, 1.0}, gas);
  EXPECT_THROW(stable_dt(b, GeometryView(g), 0.0, gas), std::invalid_argument);
  EXPECT_THROW(stable_dt(b, GeometryView(g), -0.5, gas), std::invalid_argument);
}
