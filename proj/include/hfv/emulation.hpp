#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hfv {

// How a slow worker is made slower than a fast one.
//   busy:  redundant arithmetic after the real kernel (needs a core per worker)
//   paced: every stage ends at a deadline proportional to its cell count, so
//          time-sliced workers on a small machine still show the intended ratio
//   none:  native speed, no emulation
enum class EmulationMode { none, busy, paced };

inline const char* emulation_mode_name(EmulationMode m) {
  switch (m) {
    case EmulationMode::none: return "none";
    case EmulationMode::busy: return "busy";
    case EmulationMode::paced: return "paced";
  }
  return "?";
}

inline EmulationMode emulation_mode_from_name(const std::string& s) {
  if (s == "none") return EmulationMode::none;
  if (s == "busy") return EmulationMode::busy;
  if (s == "paced") return EmulationMode::paced;
  throw std::invalid_argument("unknown emulation mode '" + s + "'");
}

// busy when every worker can own a hardware thread, paced otherwise.
inline EmulationMode auto_emulation_mode(int workers) {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= static_cast<unsigned>(workers) && hw > 1 ? EmulationMode::busy : EmulationMode::paced;
}

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Synthetic work: `units` dependent multiply-adds the optimiser cannot drop.
inline double burn(long units) {
  volatile double sink = 0.0;
  double x = 1.0000001;
  for (long k = 0; k < units; ++k) x = x * 0.9999999 + 1e-7;
  sink = x;
  return sink;
}

struct SlowdownCalibration {
  EmulationMode mode = EmulationMode::none;
  double r_target = 1.0;
  double native_cell_s = 0.0;  // measured real kernel time per cell
  double fast_cell_s = 0.0;    // per-cell stage time of a fast worker
  double slow_cell_s = 0.0;    // per-cell stage time of a slow worker
  double measured_ratio = 1.0;
  long busy_units_per_cell = 0;
  double pace_fast_s = 0.0;  // paced-mode deadline per cell, fast worker
  double pace_slow_s = 0.0;
  double boundary_factor = 0.3;  // paced boundary cost per boundary cell, in units of the worker's cell cost

  double pace_seconds(bool fast) const { return fast ? pace_fast_s : pace_slow_s; }
};

namespace detail {

template <class Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace detail

inline void pace_until(std::chrono::steady_clock::time_point release, double seconds) {
  if (seconds <= 0.0) return;
  std::this_thread::sleep_until(release + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                              std::chrono::duration<double>(seconds)));
}

// Measure the sample kernel (which processes `cells` cells) and derive the
// slow-worker cost that yields a fast/slow per-cell ratio of r_target. The
// resulting ratio is measured, and an error is raised when it falls outside
// [0.8, 1.2] x r_target. Mode none leaves both kinds at native speed.
inline SlowdownCalibration calibrate_slowdown(double r_target, const std::function<void()>& kernel, long cells,
                                              EmulationMode mode, double pace_factor = 4.0, int reps = 5) {
  if (!(r_target >= 1.0)) throw std::invalid_argument("calibrate: r_gc must be >= 1");
  if (cells < 1) throw std::invalid_argument("calibrate: sample must contain at least one cell");
  if (!(pace_factor >= 1.0)) throw std::invalid_argument("calibrate: pace factor must be >= 1");
  SlowdownCalibration cal;
  cal.mode = mode;
  cal.r_target = r_target;
  kernel();  // warm caches
  const double native = detail::time_best_of(reps, kernel) / static_cast<double>(cells);
  cal.native_cell_s = native;

  double fast = native, slow = native;
  switch (mode) {
    case EmulationMode::none:
      break;
    case EmulationMode::busy: {
      if (r_target > 1.0) {
        constexpr long probe = 2'000'000;
        const double per_unit = detail::time_best_of(3, [] { burn(probe); }) / static_cast<double>(probe);
        cal.busy_units_per_cell = std::max(1L, std::lround((r_target - 1.0) * native / per_unit));
      }
      fast = native;
      auto measure = [&] {
        const long units = cal.busy_units_per_cell * cells;
        return detail::time_best_of(reps, [&] {
                 kernel();
                 burn(units);
               }) /
               static_cast<double>(cells);
      };
      slow = measure();
      // the burn probe can catch a noisy moment; correct from the achieved ratio
      for (int pass = 0; pass < 4 && r_target > 1.0 && std::abs(slow / fast - r_target) > 0.05 * r_target; ++pass) {
        const double extra = std::max(slow - fast, 1e-300);
        cal.busy_units_per_cell =
            std::max(1L, std::lround(static_cast<double>(cal.busy_units_per_cell) * (r_target - 1.0) * fast / extra));
        slow = measure();
      }
      break;
    }
    case EmulationMode::paced: {
      const double t_fast = pace_factor * native;
      auto paced = [&](double per_cell) {
        return detail::time_best_of(reps, [&] {
                 const auto release = std::chrono::steady_clock::now();
                 kernel();
                 pace_until(release, per_cell * static_cast<double>(cells));
               }) /
               static_cast<double>(cells);
      };
      cal.pace_fast_s = t_fast;
      cal.pace_slow_s = r_target * t_fast;
      fast = paced(cal.pace_fast_s);
      slow = paced(cal.pace_slow_s);
      break;
    }
  }
  cal.fast_cell_s = fast;
  cal.slow_cell_s = slow;
  cal.measured_ratio = slow / fast;
  if (mode != EmulationMode::none && (cal.measured_ratio < 0.8 * r_target || cal.measured_ratio > 1.2 * r_target)) {
    std::ostringstream os;
    os << "calibrate: measured fast/slow ratio " << cal.measured_ratio << " is outside [" << 0.8 * r_target << ", "
       << 1.2 * r_target << "] for target " << r_target << " (" << emulation_mode_name(mode) << " mode)";
    throw CalibrationError(os.str());
  }
  return cal;
}

}  // namespace hfv
