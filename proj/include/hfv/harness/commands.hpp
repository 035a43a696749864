#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "hfv/executor.hpp"
#include "hfv/harness/cases.hpp"
#include "hfv/harness/config.hpp"
#include "hfv/harness/csv_io.hpp"
#include "hfv/harness/verify.hpp"
#include "hfv/perf_model.hpp"

namespace hfv::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// Runs `body`, mapping configuration problems to exit 2 and everything else
// that escapes to exit 1.
template <class Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

// Slow-worker emulation for a pool. Nothing to emulate when all workers are
// equally fast.
inline SlowdownCalibration emulation_for(const CaseConfig& c, const CaseSetup& setup) {
  if (c.workers.r_gc == 1.0 || resolve_emulation_mode(c) == EmulationMode::none) {
    SlowdownCalibration none;
    none.r_target = c.workers.r_gc;
    return none;
  }
  return calibrate_for_case(c, setup);
}

inline ExecOptions exec_options(const CaseConfig& c, const SlowdownCalibration& cal) {
  ExecOptions opt;
  opt.emulation = cal;
  opt.exchange_timeout = std::chrono::milliseconds(c.timeout_ms);
  return opt;
}

inline std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

inline int cmd_run(const CaseConfig& c, std::ostream& out) {
  const CaseSetup setup = build_case(c);
  const SlowdownCalibration cal = emulation_for(c, setup);
  const HeteroResult r = run_heterogeneous(setup, c.workers, c.steps, exec_options(c, cal));
  const RecordRow row = make_record(c.name, c.mode, c.scheme, c.ni, c.nj, c.workers, r);
  const std::string dir = output_dir(c);
  write_records(join_path(dir, "records.csv"), {row});
  write_solution(join_path(dir, "solution.csv"), r.solution, *setup.geometry, c.gas);
  write_timings(join_path(dir, "timings.csv"), r.timings);
  out << c.name << ": " << r.steps << " steps, " << r.substeps << " substeps, wall " << r.wall_s << " s, ssspnt "
      << row.ssspnt << "\n";
  return kExitOk;
}

struct SweepResult {
  std::vector<RecordRow> rows;  // sorted by W
  RecordRow pure_fast;
  int best = -1;  // index into rows
};

// One run per W on a shared slowdown calibration, plus the fast-only
// reference with the same fast workers. Failed members keep a row of nan.
inline SweepResult sweep(const CaseConfig& c, std::ostream& err) {
  if (c.workers.G < 1 || c.workers.C < 1) throw ConfigError("sweep needs G >= 1 and C >= 1");
  std::vector<double> Ws = c.W_list.empty() ? std::vector<double>{c.workers.W} : c.W_list;
  std::sort(Ws.begin(), Ws.end());
  const CaseSetup setup = build_case(c);
  const SlowdownCalibration cal = emulation_for(c, setup);
  const ExecOptions opt = exec_options(c, cal);

  SweepResult s;
  for (double W : Ws) {
    WorkerSpec spec = c.workers;
    spec.W = W;
    try {
      s.rows.push_back(make_record(c.name, c.mode, c.scheme, c.ni, c.nj, spec,
                                   run_heterogeneous(setup, spec, c.steps, opt)));
    } catch (const std::exception& e) {
      err << "sweep W=" << W << " failed: " << e.what() << '\n';
      s.rows.push_back(failed_record(c.name, c.mode, c.scheme, c.ni, c.nj, spec));
    }
  }
  WorkerSpec fast_only = c.workers;
  fast_only.C = 0;
  fast_only.W = 1.0;
  s.pure_fast = make_record(c.name, c.mode, c.scheme, c.ni, c.nj, fast_only,
                            run_heterogeneous(setup, fast_only, c.steps, opt));
  for (std::size_t k = 0; k < s.rows.size(); ++k)
    if (!s.rows[k].failed() && (s.best < 0 || s.rows[k].ssspnt > s.rows[static_cast<std::size_t>(s.best)].ssspnt))
      s.best = static_cast<int>(k);
  return s;
}

inline void write_sweep_summary(const std::string& path, const SweepResult& s) {
  auto out = detail::open_out(path);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const RecordRow* best = s.best >= 0 ? &s.rows[static_cast<std::size_t>(s.best)] : nullptr;
  out << "best_W,best_ssspnt,pure_fast_ssspnt,best_over_pure_fast\n";
  out << detail::fmt(best ? best->W : nan) << ',' << detail::fmt(best ? best->ssspnt : nan) << ','
      << detail::fmt(s.pure_fast.ssspnt) << ',' << detail::fmt(best ? best->ssspnt / s.pure_fast.ssspnt : nan) << '\n';
}

inline int cmd_sweep(const CaseConfig& c, std::ostream& out, std::ostream& err) {
  const SweepResult s = sweep(c, err);
  const std::string dir = output_dir(c);
  std::vector<RecordRow> all = s.rows;
  all.push_back(s.pure_fast);
  write_records(join_path(dir, "sweep.csv"), s.rows);
  write_records(join_path(dir, "sweep_with_reference.csv"), all);
  write_sweep_summary(join_path(dir, "sweep_summary.csv"), s);
  for (std::size_t k = 0; k < s.rows.size(); ++k)
    out << "W=" << s.rows[k].W << " ssspnt " << s.rows[k].ssspnt << (static_cast<int>(k) == s.best ? "  <- best" : "")
        << '\n';
  out << "pure fast ssspnt " << s.pure_fast.ssspnt << '\n';
  const bool any_failed = std::any_of(s.rows.begin(), s.rows.end(), [](const RecordRow& r) { return r.failed(); });
  return any_failed ? kExitRuntime : kExitOk;
}

inline perf::CalibrationRun calibration_run(const std::string& label, const RecordRow& r) {
  perf::CalibrationRun run;
  run.label = label;
  run.shape = {static_cast<double>(r.ni), static_cast<double>(r.nj), 1.0};
  run.G = r.G;
  run.C = r.C;
  run.interior_s = r.t_interior_s / r.substeps;
  run.boundary_s = r.t_boundary_s / r.substeps;
  run.total_s = r.wall_s / r.substeps;
  return run;
}

struct CalibrationOutcome {
  perf::PerfParams params;
  std::vector<RecordRow> runs;
  std::vector<CalibrationRow> rows;
  SlowdownCalibration emulation;
};

// Pure-slow, pure-fast and the configured pool on one shared emulation.
inline CalibrationOutcome calibrate_case(const CaseConfig& c) {
  const CaseSetup setup = build_case(c);
  CalibrationOutcome o;
  o.emulation = emulation_for(c, setup);
  const ExecOptions opt = exec_options(c, o.emulation);
  std::vector<std::pair<std::string, WorkerSpec>> pools{{"pure_slow", {0, 1, c.workers.r_gc, 1.0}},
                                                        {"pure_fast", {1, 0, c.workers.r_gc, 1.0}}};
  if (!(c.workers.G == 0 && c.workers.C == 1) && !(c.workers.G == 1 && c.workers.C == 0))
    pools.emplace_back("configured", c.workers);
  std::vector<perf::CalibrationRun> runs;
  for (const auto& [label, spec] : pools) {
    o.runs.push_back(make_record(c.name, c.mode, c.scheme, c.ni, c.nj, spec,
                                 run_heterogeneous(setup, spec, c.steps, opt)));
    runs.push_back(calibration_run(label, o.runs.back()));
  }
  std::string slow, fast;
  o.params = perf::calibrate(runs, &slow, &fast);
  std::string all;
  for (const auto& r : runs) all += (all.empty() ? "" : "+") + r.label;
  o.rows = calibration_rows(o.params, slow, fast, all);
  o.rows.push_back({"emulated_ratio", o.emulation.measured_ratio, emulation_mode_name(o.emulation.mode), ""});
  o.rows.push_back({"native_cell_s", o.emulation.native_cell_s, "kernel", ""});
  return o;
}

inline int cmd_calibrate(const CaseConfig& c, std::ostream& out) {
  const CalibrationOutcome o = calibrate_case(c);
  const std::string dir = output_dir(c);
  write_calibration(join_path(dir, "calibration.csv"), o.rows);
  write_records(join_path(dir, "calibration_runs.csv"), o.runs);
  out << "t_I " << o.params.t_I << " s, t_B " << o.params.t_B << " s, beta " << o.params.beta << ", alpha "
      << o.params.alpha << ", r_gc " << o.params.r_gc << '\n';
  for (const auto& w : o.params.warnings) out << "warning: " << w << '\n';
  return kExitOk;
}

// Per-substep time with an explicit W: each worker kind does its slab of
// interior cells and its own boundary cells at its own per-cell cost; the
// slowest kind sets the pace. Equals the aggregated form when the slow slab is
// the critical one at W = r_gc.
inline double time_hetero_at_ratio(const perf::ProblemShape& s, int G, int C, double W, const perf::PerfParams& p) {
  const double share = G * W + C;
  double worst = 0.0;
  auto kind = [&](double width, double cell_cost) {
    return (s.N_w * width + (2.0 * s.N_w + 2.0 * width) * (1.0 + p.alpha) * p.beta) * cell_cost;
  };
  if (G > 0) worst = std::max(worst, kind(s.N_l * W / share, p.t_I / p.r_gc));
  if (C > 0) worst = std::max(worst, kind(s.N_l / share, p.t_I));
  return worst;
}

struct PredictRow {
  RecordRow record;
  double measured_s = 0.0;      // per substep
  double predicted_s = 0.0;     // aggregated heterogeneous model
  double rel_error = 0.0;
  double predicted_w_s = 0.0;   // explicit-W form
  double rel_error_w = 0.0;
  double measured_speedup = 0.0;
  double predicted_speedup = 0.0;
  bool best = false;
  bool underestimates = false;  // model faster than measurement by more than its error budget
};

struct PredictReport {
  std::vector<PredictRow> rows;
  double max_rel_error = 0.0;   // over the best-W row of each case and pool
  double mean_rel_error = 0.0;
  double max_rel_error_w = 0.0;  // over all rows
  double mean_rel_error_w = 0.0;
  int compared = 0;
};

inline constexpr double kUnderestimateBand = 0.05;

inline PredictReport predict_report(const std::vector<RecordRow>& records, const perf::PerfParams& p) {
  PredictReport rep;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto same_group = [](const RecordRow& a, const RecordRow& b) {
    return a.case_name == b.case_name && a.solver == b.solver && a.scheme == b.scheme && a.ni == b.ni &&
           a.nj == b.nj && a.G == b.G && a.C == b.C;
  };
  for (const auto& r : records) {
    PredictRow row;
    row.record = r;
    const perf::ProblemShape shape{static_cast<double>(r.ni), static_cast<double>(r.nj), 1.0};
    row.measured_s = r.failed() ? nan : r.wall_s / r.substeps;
    row.predicted_s = perf::time_hetero(shape, r.G, r.C, p);
    row.rel_error = std::abs(row.predicted_s - row.measured_s) / row.measured_s;
    row.predicted_w_s = time_hetero_at_ratio(shape, r.G, r.C, r.W, p);
    row.rel_error_w = std::abs(row.predicted_w_s - row.measured_s) / row.measured_s;
    row.predicted_speedup = r.G > 0 ? perf::predict_speedup_vs_pure_fast(shape, r.G, r.C, p) : nan;
    row.measured_speedup = nan;
    for (const auto& ref : records)
      if (ref.case_name == r.case_name && ref.scheme == r.scheme && ref.ni == r.ni && ref.nj == r.nj &&
          ref.G == r.G && ref.G > 0 && ref.C == 0 && !ref.failed() && !r.failed())
        row.measured_speedup = (ref.wall_s / ref.substeps) / row.measured_s;
    row.underestimates = row.predicted_w_s < row.measured_s * (1.0 - kUnderestimateBand);
    rep.rows.push_back(row);
  }
  for (auto& row : rep.rows) {
    if (row.record.failed()) continue;
    bool is_best = true;
    for (const auto& other : rep.rows)
      if (!other.record.failed() && same_group(other.record, row.record) && other.measured_s < row.measured_s)
        is_best = false;
    row.best = is_best;
  }
  int all = 0;
  for (const auto& row : rep.rows) {
    if (row.record.failed()) continue;
    ++all;
    rep.max_rel_error_w = std::max(rep.max_rel_error_w, row.rel_error_w);
    rep.mean_rel_error_w += row.rel_error_w;
    if (!row.best) continue;
    ++rep.compared;
    rep.max_rel_error = std::max(rep.max_rel_error, row.rel_error);
    rep.mean_rel_error += row.rel_error;
  }
  rep.mean_rel_error = rep.compared ? rep.mean_rel_error / rep.compared : nan;
  rep.mean_rel_error_w = all ? rep.mean_rel_error_w / all : nan;
  if (!rep.compared) rep.max_rel_error = nan;
  if (!all) rep.max_rel_error_w = nan;
  return rep;
}

inline const char* kPredictHeader =
    "case,solver,scheme,ni,nj,G,C,r_gc,W,measured_s,predicted_s,rel_error,predicted_w_s,rel_error_w,"
    "measured_speedup,predicted_speedup,best,underestimates_overhead";

inline void write_predict_report(const std::string& dir, const PredictReport& rep) {
  using detail::fmt;
  auto out = detail::open_out(join_path(dir, "predict_report.csv"));
  out << kPredictHeader << '\n';
  for (const auto& row : rep.rows) {
    const RecordRow& r = row.record;
    out << r.case_name << ',' << r.solver << ',' << r.scheme << ',' << r.ni << ',' << r.nj << ',' << r.G << ','
        << r.C << ',' << fmt(r.r_gc) << ',' << fmt(r.W) << ',' << fmt(row.measured_s) << ',' << fmt(row.predicted_s)
        << ',' << fmt(row.rel_error) << ',' << fmt(row.predicted_w_s) << ',' << fmt(row.rel_error_w) << ','
        << fmt(row.measured_speedup) << ',' << fmt(row.predicted_speedup) << ',' << (row.best ? 1 : 0) << ','
        << (row.underestimates ? 1 : 0) << '\n';
  }
  auto sum = detail::open_out(join_path(dir, "predict_summary.csv"));
  sum << "metric,value\n"
      << "max_rel_error," << fmt(rep.max_rel_error) << '\n'
      << "mean_rel_error," << fmt(rep.mean_rel_error) << '\n'
      << "max_rel_error_w," << fmt(rep.max_rel_error_w) << '\n'
      << "mean_rel_error_w," << fmt(rep.mean_rel_error_w) << '\n'
      << "compared," << rep.compared << '\n';
}

inline int cmd_predict(const std::string& records_path, const std::string& calib_path, std::ostream& out) {
  const perf::PerfParams p = params_from_calibration(read_calibration(calib_path));
  const PredictReport rep = predict_report(read_records(records_path), p);
  std::string dir;
  if (const char* env = std::getenv("HFV_OUT_DIR"); env && *env) dir = env;
  else dir = std::filesystem::path(records_path).parent_path().string();
  write_predict_report(dir.empty() ? "." : dir, rep);
  out << "rows " << rep.rows.size() << ", best-W rows " << rep.compared << ": max relative error "
      << rep.max_rel_error << ", mean " << rep.mean_rel_error << "; explicit-W form: max " << rep.max_rel_error_w
      << ", mean " << rep.mean_rel_error_w << '\n';
  return kExitOk;
}

inline int cmd_verify(const std::string& suite, const CaseConfig& c, std::ostream& out) {
  const VerifyResult r = run_verify_suite(suite, c);
  for (const auto& d : r.details) out << "  " << d << '\n';
  out << r.summary() << '\n';
  return r.passed ? kExitOk : kExitRuntime;
}

}  // namespace hfv::harness
