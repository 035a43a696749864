#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfv/executor.hpp"
#include "hfv/metrics.hpp"
#include "hfv/perf_model.hpp"

namespace hfv::harness {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const char* kRecordHeader =
    "case,solver,scheme,ni,nj,G,C,r_gc,W,steps,substeps,wall_s,ssspnt,t_interior_s,t_boundary_s,t_pack_s,"
    "t_exchange_s,t_unpack_s,t_barrier_s";

struct RecordRow {
  std::string case_name;
  std::string solver;
  std::string scheme;
  int ni = 0, nj = 0, G = 0, C = 0;
  double r_gc = 1.0, W = 1.0;
  int steps = 0, substeps = 0;
  double wall_s = 0.0, ssspnt = 0.0;
  double t_interior_s = 0.0, t_boundary_s = 0.0, t_pack_s = 0.0, t_exchange_s = 0.0, t_unpack_s = 0.0,
         t_barrier_s = 0.0;

  bool failed() const { return !std::isfinite(wall_s); }
  int np() const { return G > 0 ? G : C; }
};

namespace detail {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double to_double(const std::string& s, const std::string& where) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CsvError("bad number '" + s + "' in " + where);
  }
}

inline std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError("cannot write '" + path + "'");
  return out;
}

inline std::vector<std::vector<std::string>> read_table(const std::string& path, const std::string& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw CsvError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw CsvError("'" + path + "' has header '" + line + "', expected '" + header + "'");
  const std::size_t cols = split(header).size();
  std::vector<std::vector<std::string>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != cols)
      throw CsvError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) + " fields");
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace detail

// Critical-path stage sums and the ssspnt of a finished run. np counts fast
// workers in a mixed or fast-only pool and slow workers otherwise.
inline RecordRow make_record(const std::string& case_name, FlowMode mode, const std::string& scheme, int ni, int nj,
                             const WorkerSpec& spec, const HeteroResult& r) {
  RecordRow row;
  row.case_name = case_name;
  row.solver = flow_mode_name(mode);
  row.scheme = scheme;
  row.ni = ni;
  row.nj = nj;
  row.G = spec.G;
  row.C = spec.C;
  row.r_gc = spec.r_gc;
  row.W = spec.W;
  row.steps = r.steps;
  row.substeps = r.substeps;
  row.wall_s = r.wall_s;
  row.ssspnt = ssspnt(static_cast<double>(ni) * nj, r.substeps, row.np(), r.wall_s);
  row.t_interior_s = r.timings.critical_path(Stage::interior);
  row.t_boundary_s = r.timings.critical_path(Stage::boundary);
  row.t_pack_s = r.timings.critical_path(Stage::pack);
  row.t_exchange_s = r.timings.critical_path(Stage::exchange);
  row.t_unpack_s = r.timings.critical_path(Stage::unpack);
  row.t_barrier_s = r.timings.critical_path(Stage::barrier);
  return row;
}

inline RecordRow failed_record(const std::string& case_name, FlowMode mode, const std::string& scheme, int ni, int nj,
                               const WorkerSpec& spec) {
  RecordRow row;
  row.case_name = case_name;
  row.solver = flow_mode_name(mode);
  row.scheme = scheme;
  row.ni = ni;
  row.nj = nj;
  row.G = spec.G;
  row.C = spec.C;
  row.r_gc = spec.r_gc;
  row.W = spec.W;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.wall_s = row.ssspnt = nan;
  row.t_interior_s = row.t_boundary_s = row.t_pack_s = row.t_exchange_s = row.t_unpack_s = row.t_barrier_s = nan;
  return row;
}

inline void write_records(const std::string& path, const std::vector<RecordRow>& rows) {
  auto out = detail::open_out(path);
  out << kRecordHeader << '\n';
  using detail::fmt;
  for (const auto& r : rows)
    out << r.case_name << ',' << r.solver << ',' << r.scheme << ',' << r.ni << ',' << r.nj << ',' << r.G << ','
        << r.C << ',' << fmt(r.r_gc) << ',' << fmt(r.W) << ',' << r.steps << ',' << r.substeps << ','
        << fmt(r.wall_s) << ',' << fmt(r.ssspnt) << ',' << fmt(r.t_interior_s) << ',' << fmt(r.t_boundary_s) << ','
        << fmt(r.t_pack_s) << ',' << fmt(r.t_exchange_s) << ',' << fmt(r.t_unpack_s) << ',' << fmt(r.t_barrier_s)
        << '\n';
}

inline std::vector<RecordRow> read_records(const std::string& path) {
  std::vector<RecordRow> rows;
  for (const auto& c : detail::read_table(path, kRecordHeader)) {
    auto d = [&](std::size_t k) { return detail::to_double(c[k], path); };
    RecordRow r;
    r.case_name = c[0];
    r.solver = c[1];
    r.scheme = c[2];
    r.ni = static_cast<int>(d(3));
    r.nj = static_cast<int>(d(4));
    r.G = static_cast<int>(d(5));
    r.C = static_cast<int>(d(6));
    r.r_gc = d(7);
    r.W = d(8);
    r.steps = static_cast<int>(d(9));
    r.substeps = static_cast<int>(d(10));
    r.wall_s = d(11);
    r.ssspnt = d(12);
    r.t_interior_s = d(13);
    r.t_boundary_s = d(14);
    r.t_pack_s = d(15);
    r.t_exchange_s = d(16);
    r.t_unpack_s = d(17);
    r.t_barrier_s = d(18);
    rows.push_back(r);
  }
  return rows;
}

// Interior cells only, i fastest.
inline void write_solution(const std::string& path, const Array2D<ConservedState>& sol, const BlockGeometry& geom,
                           const GasModel& gas) {
  auto out = detail::open_out(path);
  out << "i,j,x,y,rho,u,v,p\n" << std::setprecision(17);
  for (int j = sol.j_lo(); j < sol.j_hi(); ++j)
    for (int i = sol.i_lo(); i < sol.i_hi(); ++i) {
      const PrimitiveState w = primitive_from_conserved(sol(i, j), gas, i, j);
      out << i << ',' << j << ',' << geom.center_x(i, j) << ',' << geom.center_y(i, j) << ',' << w.rho << ','
          << w.u << ',' << w.v << ',' << w.p << '\n';
    }
}

inline void write_timings(const std::string& path, const StageTimings& t) {
  auto out = detail::open_out(path);
  out << "step,substage,worker,stage,seconds\n" << std::setprecision(17);
  for (int k = 0; k < t.substeps; ++k)
    for (int w = 0; w < t.workers; ++w)
      for (std::size_t s = 0; s < kStageNames.size(); ++s)
        out << k / t.stages_per_step << ',' << k % t.stages_per_step << ',' << w << ',' << kStageNames[s] << ','
            << t.samples[static_cast<std::size_t>(k) * static_cast<std::size_t>(t.workers) +
                         static_cast<std::size_t>(w)][s]
            << '\n';
}

struct CalibrationRow {
  std::string param;
  double value = 0.0;
  std::string source_run;
  std::string warning;
};

inline const char* kCalibrationHeader = "param,value,source_run,warning";

inline void write_calibration(const std::string& path, const std::vector<CalibrationRow>& rows) {
  auto out = detail::open_out(path);
  out << kCalibrationHeader << '\n';
  auto clean = [](std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    return s;
  };
  for (const auto& r : rows)
    out << r.param << ',' << detail::fmt(r.value) << ',' << clean(r.source_run) << ',' << clean(r.warning) << '\n';
}

inline std::vector<CalibrationRow> read_calibration(const std::string& path) {
  std::vector<CalibrationRow> rows;
  for (const auto& c : detail::read_table(path, kCalibrationHeader))
    rows.push_back({c[0], detail::to_double(c[1], path), c[2], c[3]});
  return rows;
}

inline std::vector<CalibrationRow> calibration_rows(const perf::PerfParams& p, const std::string& slow_run,
                                                    const std::string& fast_run, const std::string& all_runs) {
  const std::string beta_warning = p.warnings.empty() ? "" : p.warnings.front();
  return {{"t_I", p.t_I, slow_run, ""},      {"t_B", p.t_B, slow_run, ""},
          {"beta", p.beta, slow_run, beta_warning}, {"alpha", p.alpha, all_runs, ""},
          {"r_gc", p.r_gc, fast_run, ""}};
}

inline perf::PerfParams params_from_calibration(const std::vector<CalibrationRow>& rows) {
  perf::PerfParams p;
  bool seen[5] = {};
  for (const auto& r : rows) {
    if (r.param == "t_I") p.t_I = r.value, seen[0] = true;
    else if (r.param == "t_B") p.t_B = r.value, seen[1] = true;
    else if (r.param == "beta") p.beta = r.value, seen[2] = true;
    else if (r.param == "alpha") p.alpha = r.value, seen[3] = true;
    else if (r.param == "r_gc") p.r_gc = r.value, seen[4] = true;
    if (!r.warning.empty()) p.warnings.push_back(r.warning);
  }
  const char* names[5] = {"t_I", "t_B", "beta", "alpha", "r_gc"};
  for (int k = 0; k < 5; ++k)
    if (!seen[k]) throw CsvError(std::string("calibration is missing parameter ") + names[k]);
  return p;
}

}  // namespace hfv::harness
