#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hfv {

inline constexpr double kSsspntScale = 1e-6;

// Scaled size-steps per np-time. `steps` counts RK substeps.
inline double ssspnt(double size, double steps, double np, double time) {
  if (!(size > 0.0) || !(steps > 0.0) || !(np > 0.0) || !(time > 0.0))
    throw std::invalid_argument("ssspnt: size, steps, np and time must all be positive");
  return kSsspntScale * size * steps / (np * time);
}

struct RunRecord {
  std::string case_name;
  double size = 0.0;
  double steps = 0.0;  // RK substeps
  double np = 0.0;
  double time = 0.0;

  double metric() const { return ssspnt(size, steps, np, time); }
};

enum class Scaling { super, linear, sub };

inline const char* scaling_name(Scaling s) {
  switch (s) {
    case Scaling::super: return "super";
    case Scaling::linear: return "linear";
    case Scaling::sub: return "sub";
  }
  return "?";
}

inline constexpr double kScalingBand = 0.05;

// One classification per consecutive pair of records (sorted by increasing
// np): relative change of ssspnt above +5% is super, below -5% sub.
inline std::vector<Scaling> classify_scaling(const std::vector<RunRecord>& series) {
  if (series.size() < 2) throw std::invalid_argument("classify: need at least two records");
  for (const auto& r : series)
    if (r.case_name != series.front().case_name)
      throw std::invalid_argument("classify: records mix cases '" + series.front().case_name + "' and '" +
                                  r.case_name + "'");
  std::vector<Scaling> out;
  for (std::size_t k = 1; k < series.size(); ++k) {
    if (!(series[k].np > series[k - 1].np)) throw std::invalid_argument("classify: np must increase along the series");
    const double a = series[k - 1].metric();
    const double b = series[k].metric();
    const double change = (b - a) / a;
    out.push_back(change > kScalingBand ? Scaling::super : change < -kScalingBand ? Scaling::sub : Scaling::linear);
  }
  return out;
}

}  // namespace hfv
