#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hfv/block.hpp"
#include "hfv/state.hpp"

namespace hfv {

inline constexpr double kDivisionGuard = 1e-12;

struct MusclParams {
  double epsilon = 1.0;  // 0: first order, 1: second order
  double kappa = -1.0;   // -1: fully upwind

  void validate() const {
    if (epsilon != 0.0 && epsilon != 1.0) throw std::invalid_argument("muscl: epsilon must be 0 or 1");
    if (kappa < -1.0 || kappa > 1.0) throw std::invalid_argument("muscl: kappa must lie in [-1, 1]");
  }
};

// Van Albada limiter in its bounded form, psi = 2ab / (a^2 + b^2), evaluated on
// two consecutive jumps. The guard makes uniform data return exactly 1 and the
// result is clipped to [0, 1].
inline double van_albada(double a, double b) {
  const double psi = (2.0 * a * b + kDivisionGuard) / (a * a + b * b + kDivisionGuard);
  return std::max(0.0, psi);
}

inline StateVector van_albada(const StateVector& a, const StateVector& b) {
  StateVector psi;
  for (std::size_t k = 0; k < kNumVars; ++k) psi[k] = van_albada(a[k], b[k]);
  return psi;
}

// Limiters along one grid line. Face k lies between cells k and k+1 and its
// jump is d_k = Q_{k+1} - Q_k. psi_plus[k] pairs d_k with the next jump
// d_{k+1}; psi_minus[k] pairs it with the previous jump d_{k-1}. Entries with
// no partner jump are zero and never read by the reconstruction.
struct LineLimiters {
  std::vector<StateVector> psi_plus;
  std::vector<StateVector> psi_minus;
};

inline LineLimiters compute_limiters(std::span<const ConservedState> line) {
  LineLimiters out;
  if (line.size() < 2) return out;
  const std::size_t faces = line.size() - 1;
  std::vector<StateVector> jump(faces);
  for (std::size_t k = 0; k < faces; ++k) jump[k] = line[k + 1] - line[k];
  out.psi_plus.assign(faces, StateVector{});
  out.psi_minus.assign(faces, StateVector{});
  for (std::size_t k = 0; k + 1 < faces; ++k) out.psi_plus[k] = van_albada(jump[k], jump[k + 1]);
  for (std::size_t k = 1; k < faces; ++k) out.psi_minus[k] = van_albada(jump[k - 1], jump[k]);
  return out;
}

// The four limiter values feeding the reconstruction at face i+1/2.
struct FaceLimiters {
  StateVector plus_left;    // psi+ at i-1/2
  StateVector minus_face;   // psi- at i+1/2
  StateVector plus_face;    // psi+ at i+1/2
  StateVector minus_right;  // psi- at i+3/2
};

// Left and right states at face i+1/2 from the stencil Q_{i-1}, Q_i, Q_{i+1}, Q_{i+2}.
inline std::pair<ConservedState, ConservedState> muscl_reconstruct(const ConservedState& q_im1,
                                                                   const ConservedState& q_i,
                                                                   const ConservedState& q_ip1,
                                                                   const ConservedState& q_ip2,
                                                                   const FaceLimiters& psi,
                                                                   const MusclParams& params) {
  const double w = 0.25 * params.epsilon;
  const double km = 1.0 - params.kappa;
  const double kp = 1.0 + params.kappa;
  ConservedState left = q_i;
  ConservedState right = q_ip1;
  for (std::size_t k = 0; k < kNumVars; ++k) {
    const double d_m = q_i[k] - q_im1[k];
    const double d_0 = q_ip1[k] - q_i[k];
    const double d_p = q_ip2[k] - q_ip1[k];
    left[k] += w * (km * psi.plus_left[k] * d_m + kp * psi.minus_face[k] * d_0);
    right[k] -= w * (kp * psi.plus_face[k] * d_0 + km * psi.minus_right[k] * d_p);
  }
  return {left, right};
}

struct FaceLimiterPair {
  StateVector plus;
  StateVector minus;
};

// Limiters for a whole block, filled in one pass before any flux is formed.
// i_faces(f, j) is the face between cells (f-1, j) and (f, j) for f in
// [-1, ni+1]; j_faces(i, f) likewise along j.
struct LimiterField {
  Array2D<FaceLimiterPair> i_faces;
  Array2D<FaceLimiterPair> j_faces;
};

inline void compute_limiters(const Block& b, LimiterField& out) {
  const int ni = b.ni, nj = b.nj;
  if (out.i_faces.i_lo() != -1 || out.i_faces.i_hi() != ni + 2 || out.i_faces.j_hi() != nj)
    out.i_faces = Array2D<FaceLimiterPair>(-1, ni + 2, 0, nj);
  if (out.j_faces.j_lo() != -1 || out.j_faces.j_hi() != nj + 2 || out.j_faces.i_hi() != ni)
    out.j_faces = Array2D<FaceLimiterPair>(0, ni, -1, nj + 2);
  const auto& U = b.U;

  // jump index f: d_f = Q_f - Q_{f-1}, f in [-1, n+1]
  std::vector<StateVector> jump;
  jump.resize(static_cast<std::size_t>(std::max(ni, nj) + 3));
  for (int j = 0; j < nj; ++j) {
    for (int f = -1; f <= ni + 1; ++f) jump[f + 1] = U(f, j) - U(f - 1, j);
    for (int f = -1; f <= ni + 1; ++f) {
      auto& cell = out.i_faces(f, j);
      cell.plus = f <= ni ? van_albada(jump[f + 1], jump[f + 2]) : StateVector{};
      cell.minus = f >= 0 ? van_albada(jump[f], jump[f + 1]) : StateVector{};
    }
  }
  for (int i = 0; i < ni; ++i) {
    for (int f = -1; f <= nj + 1; ++f) jump[f + 1] = U(i, f) - U(i, f - 1);
    for (int f = -1; f <= nj + 1; ++f) {
      auto& cell = out.j_faces(i, f);
      cell.plus = f <= nj ? van_albada(jump[f + 1], jump[f + 2]) : StateVector{};
      cell.minus = f >= 0 ? van_albada(jump[f], jump[f + 1]) : StateVector{};
    }
  }
}

}  // namespace hfv
