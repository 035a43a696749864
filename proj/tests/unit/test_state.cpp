#include <gtest/gtest.h>

#include <random>

#include "hfv/state.hpp"
#include "test_support.hpp"

using namespace hfv;

TEST(State, QuiescentInversion) {
  const GasModel gas;
  const PrimitiveState w = primitive_from_conserved({{1.0, 0.0, 0.0, 2.5}}, gas);
  EXPECT_DOUBLE_EQ(w.rho, 1.0);
  EXPECT_DOUBLE_EQ(w.u, 0.0);
  EXPECT_DOUBLE_EQ(w.v, 0.0);
  EXPECT_DOUBLE_EQ(w.p, 1.0);
}

TEST(State, InvalidStatesCarryCell) {
  const GasModel gas;
  try {
    primitive_from_conserved({{-1.0, 0.0, 0.0, 2.5}}, gas, 3, 4);
    FAIL();
  } catch (const InvalidStateError& e) {
    EXPECT_EQ(e.i(), 3);
    EXPECT_EQ(e.j(), 4);
  }
  EXPECT_THROW(primitive_from_conserved({{1.0, 3.0, 0.0, 2.0}}, gas), InvalidStateError);
}

TEST(State, RoundTripRandomised) {
  const GasModel gas;
  std::mt19937_64 rng(11);
  for (int k = 0; k < 10000; ++k) {
    const ConservedState U = conserved_from_primitive(testsupport::random_state(rng), gas);
    const ConservedState back = conserved_from_primitive(primitive_from_conserved(U, gas), gas);
    const double scale = std::max({std::abs(U[0]), std::abs(U[1]), std::abs(U[2]), std::abs(U[3])});
    for (std::size_t c = 0; c < kNumVars; ++c) ASSERT_LE(std::abs(back[c] - U[c]), 1e-15 * scale);
  }
}

TEST(State, TableOneInflow) {
  const GasModel gas;
  const PrimitiveState w = freestream(4.0, 12270.0, 217.0, gas);
  EXPECT_NEAR(w.rho, 0.19702, 5e-5);
  EXPECT_NEAR(w.u, 1181.0, 0.5);
  EXPECT_EQ(w.v, 0.0);
  EXPECT_NEAR(speed_of_sound(w, gas), std::sqrt(1.4 * 287.0 * 217.0), 1e-9);
  EXPECT_NEAR(speed_of_sound(w, gas), 295.28, 0.01);
  EXPECT_NEAR(temperature(w, gas), 217.0, 1e-10);
}

TEST(State, TotalEnthalpy) {
  const GasModel gas;
  EXPECT_DOUBLE_EQ(total_enthalpy({1.0, 0.0, 0.0, 1.0}, gas), 3.5);
  EXPECT_DOUBLE_EQ(total_enthalpy({1.0, 1.0, 0.0, 1.0}, gas), 4.0);
  const PrimitiveState w = freestream(4.0, 12270.0, 217.0, gas);
  EXPECT_NEAR(total_enthalpy(w, gas), gas.cp() * 217.0 + 0.5 * w.u * w.u, 1e-9 * total_enthalpy(w, gas));
}

TEST(State, SpeedOfSound) {
  const GasModel gas;
  EXPECT_NEAR(speed_of_sound({1.0, 0.3, -0.2, 1.0}, gas), 1.18322, 1e-5);
  EXPECT_DOUBLE_EQ(speed_of_sound({2.0, 0.0, 0.0, 3.0}, gas), speed_of_sound({8.0, 0.0, 0.0, 12.0}, gas));
  EXPECT_THROW(speed_of_sound({1.0, 0.0, 0.0, -1.0}, gas), InvalidStateError);
}

TEST(State, NormalVelocityRotationInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  for (int k = 0; k < 1000; ++k) {
    PrimitiveState w = testsupport::random_state(rng);
    const double a = ang(rng), t = ang(rng);
    const double nx = std::cos(a), ny = std::sin(a);
    const double vn = normal_velocity(w, nx, ny);
    PrimitiveState r = w;
    r.u = std::cos(t) * w.u - std::sin(t) * w.v;
    r.v = std::sin(t) * w.u + std::cos(t) * w.v;
    const double rn = normal_velocity(r, std::cos(t) * nx - std::sin(t) * ny, std::sin(t) * nx + std::cos(t) * ny);
    ASSERT_NEAR(rn, vn, 1e-14 * std::max(1.0, std::hypot(w.u, w.v)));
  }
}

TEST(State, GasValidation) {
  GasModel g;
  EXPECT_NO_THROW(g.validate());
  g.gamma = 1.0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = GasModel{};
  g.mu = -1.0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}
