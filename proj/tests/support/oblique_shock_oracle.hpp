#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace oracle {

struct ObliqueShockState {
  double beta_deg;
  double pressure_ratio;
  double mach_downstream;
};

// Weak oblique shock from the cubic in sin^2(beta): its three real roots are
// the expansion (unphysical), weak and strong solutions, in increasing order.
inline ObliqueShockState weak_oblique_shock(double mach, double theta_deg, double gamma) {
  const double th = theta_deg * std::numbers::pi / 180.0;
  const double m2 = mach * mach;
  const double s2 = std::sin(th) * std::sin(th);
  const double b = -(m2 + 2.0) / m2 - gamma * s2;
  const double c = (2.0 * m2 + 1.0) / (m2 * m2) + ((gamma + 1.0) * (gamma + 1.0) / 4.0 + (gamma - 1.0) / m2) * s2;
  const double d = -std::cos(th) * std::cos(th) / (m2 * m2);
  // depressed cubic t^3 + P t + Q with x = t - b/3, trigonometric roots
  const double P = c - b * b / 3.0;
  const double Q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double r = 2.0 * std::sqrt(-P / 3.0);
  const double phi = std::acos(3.0 * Q / (P * r));
  std::array<double, 3> roots{};
  for (int k = 0; k < 3; ++k) roots[k] = r * std::cos((phi - 2.0 * std::numbers::pi * k) / 3.0) - b / 3.0;
  std::sort(roots.begin(), roots.end());
  const double beta = std::asin(std::sqrt(roots[1]));

  ObliqueShockState out;
  out.beta_deg = beta * 180.0 / std::numbers::pi;
  const double mn1 = mach * std::sin(beta);
  out.pressure_ratio = (2.0 * gamma * mn1 * mn1 - (gamma - 1.0)) / (gamma + 1.0);
  const double mn2sq = ((gamma - 1.0) * mn1 * mn1 + 2.0) / (2.0 * gamma * mn1 * mn1 - (gamma - 1.0));
  out.mach_downstream = std::sqrt(mn2sq) / std::sin(beta - th);
  return out;
}

}  // namespace oracle
