#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hfv::perf {

struct ProblemShape {
  double N_l = 1;
  double N_w = 1;
  double N_d = 1;

  double cells() const { return N_l * N_w * N_d; }

  void validate() const {
    if (!(N_l >= 1) || !(N_w >= 1) || !(N_d >= 1)) throw std::invalid_argument("shape: all dimensions must be >= 1");
  }
};

struct PerfParams {
  double t_I = 0.0;   // seconds per interior cell per iteration, slow worker
  double t_B = 0.0;   // seconds per boundary cell per iteration
  double beta = 0.0;  // t_B / t_I
  double alpha = 0.0; // transfer and synchronisation overhead relative to boundary time
  double t_S = 0.0;
  double t_DH = 0.0;
  double t_HH = 0.0;
  double t_HD = 0.0;
  double r_gc = 1.0;
  std::vector<std::string> warnings;

  double overheads() const { return t_DH + t_HH + t_HD + 5.0 * t_S; }
};

inline constexpr double kBetaTypicalLow = 0.2;
inline constexpr double kBetaTypicalHigh = 0.5;
inline constexpr double kBetaSaneLow = 0.05;
inline constexpr double kBetaSaneHigh = 1.0;

// Warnings for a beta outside the typical band, and (more loudly) outside the
// sanity window. Neither stops calibration.
inline std::vector<std::string> beta_warnings(double beta) {
  std::vector<std::string> w;
  std::ostringstream os;
  if (beta < kBetaSaneLow || beta > kBetaSaneHigh) {
    os << "beta " << beta << " outside sanity window [" << kBetaSaneLow << ", " << kBetaSaneHigh << "]";
    w.push_back(os.str());
  } else if (beta < kBetaTypicalLow || beta > kBetaTypicalHigh) {
    os << "beta " << beta << " outside typical range [" << kBetaTypicalLow << ", " << kBetaTypicalHigh << "]";
    w.push_back(os.str());
  }
  return w;
}

enum class BoundaryAccounting { full, planar };

// Sequential time per iteration. `planar` drops the 2 N_l N_w faces normal to
// the third direction, which are not boundaries of a one-cell-deep 2D domain.
inline double time_sequential(const ProblemShape& s, const PerfParams& p,
                              BoundaryAccounting acc = BoundaryAccounting::full) {
  s.validate();
  const double faces = (acc == BoundaryAccounting::full ? 2.0 * s.N_l * s.N_w : 0.0) + 2.0 * s.N_l * s.N_d +
                       2.0 * s.N_w * s.N_d;
  return s.N_l * s.N_w * s.N_d * p.t_I + faces * p.t_B + p.t_DH + p.t_HH + p.t_HD + 5.0 * p.t_S;
}

inline double time_multi_cpu(const ProblemShape& s, int C, const PerfParams& p) {
  s.validate();
  if (C < 1) throw std::invalid_argument("time_multi_cpu: C must be >= 1");
  return s.N_l * s.N_w / C * p.t_I + (2.0 * s.N_w + 2.0 * s.N_l / C) * p.t_B + p.t_DH + p.t_HH + p.t_HD +
         5.0 * p.t_S;
}

inline double time_multi_gpu(const ProblemShape& s, int G, const PerfParams& p) {
  s.validate();
  if (G < 1) throw std::invalid_argument("time_multi_gpu: G must be >= 1");
  if (!(p.r_gc >= 1.0)) throw std::invalid_argument("time_multi_gpu: r_gc must be >= 1");
  const double units = G * p.r_gc;
  return s.N_l * s.N_w / units * p.t_I + (2.0 * s.N_w + 2.0 * s.N_l / units) * p.t_B + p.t_DH + p.t_HH + p.t_HD +
         5.0 * p.t_S;
}

// Aggregated heterogeneous time, with t_B = beta t_I and all transfer and
// synchronisation cost folded into alpha.
inline double time_hetero(const ProblemShape& s, int G, int C, const PerfParams& p) {
  s.validate();
  if (G < 0 || C < 0 || G + C < 1) throw std::invalid_argument("time_hetero: need G + C >= 1");
  const double units = G * p.r_gc + C;
  return (s.N_l * s.N_w / units + (2.0 * s.N_w + 2.0 * s.N_l / units) * (1.0 + p.alpha) * p.beta) * p.t_I;
}

// The same aggregation applied to a fast-only and a slow-only pool.
inline double time_multi_gpu_aggregated(const ProblemShape& s, int G, const PerfParams& p) {
  if (G < 1) throw std::invalid_argument("time_multi_gpu: G must be >= 1");
  const double units = G * p.r_gc;
  return (s.N_l * s.N_w / units + (2.0 * s.N_w + 2.0 * s.N_l / units) * (1.0 + p.alpha) * p.beta) * p.t_I;
}

inline double time_multi_cpu_aggregated(const ProblemShape& s, int C, const PerfParams& p) {
  if (C < 1) throw std::invalid_argument("time_multi_cpu: C must be >= 1");
  const double units = C;
  return (s.N_l * s.N_w / units + (2.0 * s.N_w + 2.0 * s.N_l / units) * (1.0 + p.alpha) * p.beta) * p.t_I;
}

inline double predict_speedup_vs_pure_fast(const ProblemShape& s, int G, int C, const PerfParams& p) {
  if (G < 1) throw std::invalid_argument("speedup: needs at least one fast worker");
  return time_multi_gpu_aggregated(s, G, p) / time_hetero(s, G, C, p);
}

struct OptimalRatio {
  double W = 1.0;
  std::string note;
};

inline OptimalRatio predict_optimal_ratio(const PerfParams& p, int G, int C) {
  if (G < 1 || C < 1) return {1.0, "no mixed pool; ratio is irrelevant"};
  return {p.r_gc,
          "perfect-balance estimate; measured optima tend to sit at or above it because slow workers also carry "
          "control overhead"};
}

// Per-iteration measurements of one run, averaged over substeps.
struct CalibrationRun {
  std::string label;
  ProblemShape shape;
  int G = 0;
  int C = 0;
  double interior_s = 0.0;  // critical-path interior time
  double boundary_s = 0.0;  // critical-path boundary time
  double total_s = 0.0;     // wall time
};

// Fit model parameters. Needs one pure-slow run (G = 0, C = 1), one pure-fast
// run (G = 1, C = 0) and at least two runs overall for alpha.
inline PerfParams calibrate(const std::vector<CalibrationRun>& runs, std::string* slow_label = nullptr,
                            std::string* fast_label = nullptr) {
  const CalibrationRun* slow = nullptr;
  const CalibrationRun* fast = nullptr;
  for (const auto& r : runs) {
    if (r.G == 0 && r.C == 1 && !slow) slow = &r;
    if (r.G == 1 && r.C == 0 && !fast) fast = &r;
  }
  if (!slow) throw std::invalid_argument("calibrate: no pure-slow single-worker run");
  if (!fast) throw std::invalid_argument("calibrate: no pure-fast single-worker run");
  if (runs.size() < 2) throw std::invalid_argument("calibrate: alpha needs at least two runs");
  if (slow_label) *slow_label = slow->label;
  if (fast_label) *fast_label = fast->label;

  PerfParams p;
  const ProblemShape& ss = slow->shape;
  p.t_I = slow->interior_s / ss.cells();
  if (!(p.t_I > 0.0)) throw std::invalid_argument("calibrate: pure-slow interior time must be positive");
  const double boundary_cells = 2.0 * ss.N_w + 2.0 * ss.N_l;
  p.t_B = slow->boundary_s / boundary_cells;
  p.beta = p.t_B / p.t_I;
  const double fast_cell = fast->interior_s / fast->shape.cells();
  if (!(fast_cell > 0.0)) throw std::invalid_argument("calibrate: pure-fast interior time must be positive");
  p.r_gc = std::max(1.0, p.t_I / fast_cell);

  double sxx = 0.0, sxy = 0.0;
  for (const auto& r : runs) {
    const double units = r.G * p.r_gc + r.C;
    const double x = (2.0 * r.shape.N_w + 2.0 * r.shape.N_l / units) * p.beta * p.t_I;
    const double y = r.total_s - r.shape.N_l * r.shape.N_w / units * p.t_I - x;
    sxx += x * x;
    sxy += x * y;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("calibrate: degenerate alpha fit (no boundary cost in any run)");
  p.alpha = std::max(0.0, sxy / sxx);
  p.warnings = beta_warnings(p.beta);
  return p;
}

}  // namespace hfv::perf
