#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hfv {

inline constexpr std::size_t kNumVars = 4;

// Thrown when a state has non-positive density or pressure. Carries the
// global cell index when the failure happened inside a block sweep.
class InvalidStateError : public std::runtime_error {
 public:
  InvalidStateError(const std::string& what, int i = -1, int j = -1)
      : std::runtime_error(format(what, i, j)), i_(i), j_(j) {}

  int i() const noexcept { return i_; }
  int j() const noexcept { return j_; }

 private:
  static std::string format(const std::string& what, int i, int j) {
    if (i < 0 && j < 0) return what;
    std::ostringstream os;
    os << what << " at cell (" << i << ", " << j << ")";
    return os.str();
  }
  int i_, j_;
};

// Four-component vector in (mass, x-momentum, y-momentum, energy) ordering.
// Used both for cell-averaged conserved states and for flux vectors.
struct StateVector {
  std::array<double, kNumVars> q{};

  constexpr double& operator[](std::size_t k) { return q[k]; }
  constexpr double operator[](std::size_t k) const { return q[k]; }

  constexpr double rho() const { return q[0]; }
  constexpr double rho_u() const { return q[1]; }
  constexpr double rho_v() const { return q[2]; }
  constexpr double rho_et() const { return q[3]; }

  constexpr StateVector& operator+=(const StateVector& o) {
    for (std::size_t k = 0; k < kNumVars; ++k) q[k] += o.q[k];
    return *this;
  }
  constexpr StateVector& operator-=(const StateVector& o) {
    for (std::size_t k = 0; k < kNumVars; ++k) q[k] -= o.q[k];
    return *this;
  }
  constexpr StateVector& operator*=(double s) {
    for (auto& v : q) v *= s;
    return *this;
  }

  friend constexpr StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend constexpr StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend constexpr StateVector operator*(StateVector a, double s) { return a *= s; }
  friend constexpr StateVector operator*(double s, StateVector a) { return a *= s; }
  friend constexpr bool operator==(const StateVector&, const StateVector&) = default;
};

using ConservedState = StateVector;
using FluxVector = StateVector;

struct PrimitiveState {
  double rho{};
  double u{};
  double v{};
  double p{};

  friend constexpr bool operator==(const PrimitiveState&, const PrimitiveState&) = default;
};

// Calorically perfect gas with constant viscosity.
struct GasModel {
  double gamma = 1.4;
  double R = 287.0;
  double mu = 0.0;
  double Pr = 0.72;

  double cp() const { return gamma * R / (gamma - 1.0); }
  double conductivity() const { return mu * cp() / Pr; }

  void validate() const {
    if (!(gamma > 1.0)) throw std::invalid_argument("gas: gamma must exceed 1");
    if (!(R > 0.0)) throw std::invalid_argument("gas: R must be positive");
    if (!(mu >= 0.0)) throw std::invalid_argument("gas: mu must be non-negative");
    if (!(Pr > 0.0)) throw std::invalid_argument("gas: Pr must be positive");
  }
};

inline void require_valid(const PrimitiveState& w, int i = -1, int j = -1) {
  if (!(w.rho > 0.0)) throw InvalidStateError("non-positive density", i, j);
  if (!(w.p > 0.0)) throw InvalidStateError("non-positive pressure", i, j);
}

inline PrimitiveState primitive_from_conserved(const ConservedState& U, const GasModel& gas,
                                               int i = -1, int j = -1) {
  const double rho = U.rho();
  if (!(rho > 0.0)) throw InvalidStateError("non-positive density", i, j);
  const double u = U.rho_u() / rho;
  const double v = U.rho_v() / rho;
  const double p = (gas.gamma - 1.0) * (U.rho_et() - 0.5 * rho * (u * u + v * v));
  if (!(p > 0.0)) throw InvalidStateError("non-positive pressure", i, j);
  return {rho, u, v, p};
}

inline ConservedState conserved_from_primitive(const PrimitiveState& w, const GasModel& gas) {
  return {{w.rho, w.rho * w.u, w.rho * w.v,
           w.p / (gas.gamma - 1.0) + 0.5 * w.rho * (w.u * w.u + w.v * w.v)}};
}

inline double total_energy(const PrimitiveState& w, const GasModel& gas) {
  return w.p / ((gas.gamma - 1.0) * w.rho) + 0.5 * (w.u * w.u + w.v * w.v);
}

/// h_t = e_t + p / rho
inline double total_enthalpy(const PrimitiveState& w, const GasModel& gas) {
  require_valid(w);
  return total_energy(w, gas) + w.p / w.rho;
}

inline double speed_of_sound(const PrimitiveState& w, const GasModel& gas) {
  require_valid(w);
  return std::sqrt(gas.gamma * w.p / w.rho);
}

inline double temperature(const PrimitiveState& w, const GasModel& gas) { return w.p / (w.rho * gas.R); }

inline double normal_velocity(const PrimitiveState& w, double nx, double ny) { return nx * w.u + ny * w.v; }

inline double mach_number(const PrimitiveState& w, const GasModel& gas) {
  return std::hypot(w.u, w.v) / speed_of_sound(w, gas);
}

// Freestream from Mach number, static pressure and temperature; flow along +x.
inline PrimitiveState freestream(double mach, double pressure, double temperature_K, const GasModel& gas,
                                 double flow_angle_rad = 0.0) {
  const double rho = pressure / (gas.R * temperature_K);
  const double speed = mach * std::sqrt(gas.gamma * gas.R * temperature_K);
  return {rho, speed * std::cos(flow_angle_rad), speed * std::sin(flow_angle_rad), pressure};
}

}  // namespace hfv
