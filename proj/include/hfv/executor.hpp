#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <barrier>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hfv/block.hpp"
#include "hfv/boundary.hpp"
#include "hfv/emulation.hpp"
#include "hfv/mesh.hpp"
#include "hfv/muscl.hpp"
#include "hfv/partition.hpp"
#include "hfv/residual.hpp"
#include "hfv/time_integration.hpp"

namespace hfv {

// Everything needed to march one case, independent of how it is decomposed.
struct CaseSetup {
  std::string name = "case";
  std::shared_ptr<const BlockGeometry> geometry;
  BoundarySpec boundary;  // physical edges of the whole domain
  ResidualOptions residual;
  ButcherTableau scheme = ButcherTableau::classical4();
  double cfl = 0.5;
  double fixed_dt = 0.0;  // used instead of the CFL step when positive
  std::function<PrimitiveState(double, double)> initial;

  int ni() const { return geometry->ni; }
  int nj() const { return geometry->nj; }

  void validate() const {
    if (!geometry) throw std::invalid_argument("case: no geometry");
    if (!initial) throw std::invalid_argument("case: no initial condition");
    for (Edge e : kAllEdges)
      if (boundary.is_connected(e)) throw std::invalid_argument("case: physical edges cannot be connected");
    scheme.validate();
    residual.muscl.validate();
    residual.gas.validate();
    if (!(fixed_dt > 0.0) && !(cfl > 0.0)) throw std::invalid_argument("case: cfl must be positive");
  }
};

// Single-block reference path: boundary, limiter pass and residual inside
// each RK stage.
class SerialSolver {
 public:
  explicit SerialSolver(const CaseSetup& setup) : setup_(setup), geom_(*setup.geometry) {
    setup_.validate();
    block_ = Block(0, setup_.ni(), setup_.nj());
    fill_block(block_, geom_, setup_.residual.gas, setup_.initial);
  }

  // Advance one step, no further than dt_cap; returns the step taken.
  double step(double dt_cap = std::numeric_limits<double>::infinity()) {
    double dt = setup_.fixed_dt > 0.0
                    ? setup_.fixed_dt
                    : stable_dt(block_, geom_, setup_.cfl, setup_.residual.gas, setup_.residual.mode);
    dt = std::min(dt, dt_cap);
    residual_calls_ += rk_advance(block_, [this](Block& s, Array2D<FluxVector>& R) { evaluate(s, R); }, dt,
                                  setup_.scheme, geom_, setup_.residual.gas);
    time_ += dt;
    return dt;
  }

  void run(int steps) {
    for (int n = 0; n < steps; ++n) step();
  }

  void run_until(double t_end) {
    while (time_ < t_end * (1.0 - 1e-14)) step(t_end - time_);
  }

  // Ghost refresh, limiter pass and residual for one stage state.
  void evaluate(Block& s, Array2D<FluxVector>& R) {
    apply_boundary(s, geom_, setup_.boundary, setup_.residual.gas);
    compute_limiters(s, limiters_);
    residual(s, geom_, limiters_, setup_.residual, R, ws_);
  }

  const Block& block() const { return block_; }
  Block& block() { return block_; }
  GeometryView geometry() const { return geom_; }
  double time() const { return time_; }
  long residual_calls() const { return residual_calls_; }

  Array2D<ConservedState> solution() const {
    Array2D<ConservedState> out(0, block_.ni, 0, block_.nj);
    for (int j = 0; j < block_.nj; ++j)
      for (int i = 0; i < block_.ni; ++i) out(i, j) = block_.U(i, j);
    return out;
  }

 private:
  CaseSetup setup_;
  GeometryView geom_;
  Block block_;
  LimiterField limiters_;
  ResidualWorkspace ws_;
  double time_ = 0.0;
  long residual_calls_ = 0;
};

enum class Stage { interior = 0, boundary, pack, exchange, unpack, barrier };
inline constexpr int kWorkflowStages = 5;
inline constexpr std::array<const char*, 6> kStageNames{"interior", "boundary", "pack", "exchange", "unpack", "barrier"};

inline const char* stage_name(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

// Per-worker, per-substep stage times; barrier holds the summed wait of the
// five synchronisations in that substep.
struct StageTimings {
  int workers = 0;
  int substeps = 0;
  int stages_per_step = 1;
  std::vector<std::array<double, 6>> samples;  // index substep * workers + worker
  std::vector<double> substep_wall;

  StageTimings() = default;
  StageTimings(int w, int n, int s)
      : workers(w), substeps(n), stages_per_step(s),
        samples(static_cast<std::size_t>(w) * static_cast<std::size_t>(n), std::array<double, 6>{}),
        substep_wall(static_cast<std::size_t>(n), 0.0) {}

  double& at(int substep, int worker, Stage st) {
    return samples[static_cast<std::size_t>(substep) * static_cast<std::size_t>(workers) +
                   static_cast<std::size_t>(worker)][static_cast<std::size_t>(st)];
  }
  double at(int substep, int worker, Stage st) const {
    return samples[static_cast<std::size_t>(substep) * static_cast<std::size_t>(workers) +
                   static_cast<std::size_t>(worker)][static_cast<std::size_t>(st)];
  }

  double substep_max(int substep, Stage st) const {
    double m = 0.0;
    for (int w = 0; w < workers; ++w) m = std::max(m, at(substep, w, st));
    return m;
  }

  // Sum over substeps of the slowest worker's time in a stage.
  double critical_path(Stage st) const {
    double t = 0.0;
    for (int k = 0; k < substeps; ++k) t += substep_max(k, st);
    return t;
  }

  double worker_total(int worker, Stage st) const {
    double t = 0.0;
    for (int k = 0; k < substeps; ++k) t += at(k, worker, st);
    return t;
  }
};

class WorkerError : public std::runtime_error {
 public:
  WorkerError(int worker, Stage stage, int step, int substage, const std::string& what)
      : std::runtime_error(format(worker, stage, step, substage, what)), worker_(worker), stage_(stage) {}
  int worker() const noexcept { return worker_; }
  Stage stage() const noexcept { return stage_; }

 private:
  static std::string format(int worker, Stage stage, int step, int substage, const std::string& what) {
    std::ostringstream os;
    os << "worker " << worker << " failed in " << stage_name(stage) << " stage (step " << step << ", substage "
       << substage << "): " << what;
    return os.str();
  }
  int worker_;
  Stage stage_;
};

class DeadlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Test hook: make one worker fail, or silently withhold one ghost message.
struct FaultInjection {
  int worker = -1;
  int step = 0;
  int substage = 0;
  Stage stage = Stage::interior;
  bool drop_message = false;
};

struct ExecOptions {
  SlowdownCalibration emulation;  // mode none by default
  std::chrono::milliseconds exchange_timeout{10000};
  std::optional<FaultInjection> fault;
};

struct HeteroResult {
  Partition partition;
  Array2D<ConservedState> solution;  // gathered interior, [0, ni) x [0, nj)
  StageTimings timings;
  double wall_s = 0.0;
  double sim_time = 0.0;
  int steps = 0;
  int substeps = 0;
  long barrier_count = 0;
  long residual_calls = 0;
};

namespace detail {

inline constexpr int kExchangeColumns = kGhostDepth;

// Strip of kExchangeColumns interior columns over the full ghost-frame height.
inline void pack_columns(const Block& b, int first_col, std::vector<ConservedState>& out) {
  out.clear();
  for (int c = 0; c < kExchangeColumns; ++c)
    for (int j = b.U.j_lo(); j < b.U.j_hi(); ++j) out.push_back(b.U(first_col + c, j));
}

inline void unpack_columns(Block& b, int first_col, const std::vector<ConservedState>& in) {
  std::size_t k = 0;
  for (int c = 0; c < kExchangeColumns; ++c)
    for (int j = b.U.j_lo(); j < b.U.j_hi(); ++j) b.U(first_col + c, j) = in[k++];
}

// One directed edge between neighbouring workers.
struct Mailbox {
  std::mutex m;
  std::condition_variable cv;
  std::optional<std::vector<ConservedState>> msg;
};

}  // namespace detail

// Copy neighbour interiors into every connected ghost layer of a set of
// adjacent slabs (left to right). Only ghost cells are written.
inline void exchange_ghosts(std::vector<Block>& blocks) {
  std::vector<ConservedState> buf;
  for (std::size_t k = 0; k + 1 < blocks.size(); ++k) {
    Block& left = blocks[k];
    Block& right = blocks[k + 1];
    detail::pack_columns(left, left.ni - kGhostDepth, buf);
    detail::unpack_columns(right, -kGhostDepth, buf);
    detail::pack_columns(right, 0, buf);
    detail::unpack_columns(left, left.ni, buf);
    left.ghosts_pending[static_cast<int>(Edge::east)] = false;
    right.ghosts_pending[static_cast<int>(Edge::west)] = false;
  }
}

inline BoundarySpec slab_boundary(const BoundarySpec& physical, std::size_t k, std::size_t count) {
  BoundarySpec spec = physical;
  if (k > 0) spec[Edge::west] = Connected{static_cast<int>(k) - 1};
  if (k + 1 < count) spec[Edge::east] = Connected{static_cast<int>(k) + 1};
  return spec;
}

namespace detail {

struct Shared {
  int workers = 0;
  int stages = 0;
  int steps = 0;
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<double> local_dt;
  double dt = 0.0;
  bool fixed_dt = false;
  long barrier_count = 0;
  std::chrono::steady_clock::time_point release;
  std::chrono::steady_clock::time_point substep_start;
  StageTimings* timings = nullptr;
  // mail[2 * k] carries k -> k + 1, mail[2 * k + 1] carries k + 1 -> k
  std::vector<std::unique_ptr<Mailbox>> mail;

  void fail(std::exception_ptr e) {
    {
      std::lock_guard lk(error_mutex);
      if (!first_error) first_error = e;
    }
    abort.store(true);
    for (auto& mb : mail) {
      std::lock_guard lk(mb->m);
      mb->cv.notify_all();
    }
  }
};

// Runs once per workflow barrier, before any worker is released.
struct PhaseCompletion {
  Shared* sh;
  void operator()() noexcept {
    const long phase = sh->barrier_count++;
    const auto now = std::chrono::steady_clock::now();
    sh->release = now;
    const long substep = phase / kWorkflowStages;
    const int within = static_cast<int>(phase % kWorkflowStages);
    if (within == 0 && substep % sh->stages == sh->stages - 1 && !sh->fixed_dt)
      sh->dt = *std::min_element(sh->local_dt.begin(), sh->local_dt.end());
    if (within == kWorkflowStages - 1 && substep < sh->timings->substeps) {
      sh->timings->substep_wall[static_cast<std::size_t>(substep)] =
          std::chrono::duration<double>(now - sh->substep_start).count();
      sh->substep_start = now;
    }
  }
};

struct StartCompletion {
  Shared* sh;
  void operator()() noexcept {
    sh->release = std::chrono::steady_clock::now();
    sh->substep_start = sh->release;
  }
};

}  // namespace detail

// March a case for `steps` RK steps across G fast and C slow workers, each
// owning one slab along i. Every RK substage runs five stages, each closed by
// a global barrier: interior (limiters, residual, stage update), boundary
// enforcement, pack, exchange, unpack.
inline HeteroResult run_heterogeneous(const CaseSetup& setup, const WorkerSpec& spec, int steps,
                                      const ExecOptions& opt = {}) {
  setup.validate();
  if (steps < 0) throw std::invalid_argument("run: steps must be non-negative");
  HeteroResult result;
  result.partition = partition_weighted(setup.ni(), spec);
  const auto& slabs = result.partition.slabs;
  const std::size_t nw = slabs.size();
  if (nw > 1)
    for (const auto& s : slabs)
      if (s.width < kGhostDepth)
        throw std::invalid_argument("run: slab of worker " + std::to_string(s.worker) + " has width " +
                                    std::to_string(s.width) + ", exchange needs at least " +
                                    std::to_string(kGhostDepth) + " columns");

  const BlockGeometry& global = *setup.geometry;
  const GasModel& gas = setup.residual.gas;
  const ButcherTableau& tab = setup.scheme;
  const int s = tab.s;

  std::vector<Block> blocks;
  std::vector<BoundarySpec> specs;
  std::vector<GeometryView> views;
  for (std::size_t k = 0; k < nw; ++k) {
    blocks.emplace_back(slabs[k].i_begin, slabs[k].width, setup.nj());
    views.emplace_back(global, slabs[k].i_begin);
    specs.push_back(slab_boundary(setup.boundary, k, nw));
    fill_block(blocks[k], views[k], gas, setup.initial);
    apply_boundary(blocks[k], views[k], specs[k], gas);
  }
  exchange_ghosts(blocks);

  detail::Shared sh;
  sh.workers = static_cast<int>(nw);
  sh.stages = s;
  sh.steps = steps;
  sh.local_dt.assign(nw, 0.0);
  sh.fixed_dt = setup.fixed_dt > 0.0;
  if (sh.fixed_dt) {
    sh.dt = setup.fixed_dt;
  } else {
    sh.dt = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < nw; ++k)
      sh.dt = std::min(sh.dt, stable_dt(blocks[k], views[k], setup.cfl, gas, setup.residual.mode));
  }
  for (std::size_t k = 0; k + 1 < nw; ++k) {
    sh.mail.push_back(std::make_unique<detail::Mailbox>());
    sh.mail.push_back(std::make_unique<detail::Mailbox>());
  }
  result.timings = StageTimings(static_cast<int>(nw), steps * s, s);
  sh.timings = &result.timings;

  std::barrier start_gate(static_cast<std::ptrdiff_t>(nw), detail::StartCompletion{&sh});
  std::barrier sync(static_cast<std::ptrdiff_t>(nw), detail::PhaseCompletion{&sh});
  std::vector<double> sim_time(nw, 0.0);

  auto worker = [&](std::size_t k) {
    const Slab& slab = slabs[k];
    Block base = std::move(blocks[k]);
    Block stage = base;
    const GeometryView geom = views[k];
    const BoundarySpec& bspec = specs[k];
    const bool has_west = k > 0, has_east = k + 1 < nw;
    LimiterField limiters;
    ResidualWorkspace ws;
    std::vector<Array2D<FluxVector>> K(static_cast<std::size_t>(s));
    std::vector<ConservedState> send_west, send_east, recv_west, recv_east;
    const long cells = static_cast<long>(slab.width) * setup.nj();
    const long boundary_cells = 2L * setup.nj() + 2L * slab.width;
    const auto& emu = opt.emulation;
    double t = 0.0;

    int step = 0, sub = 0;
    Stage current = Stage::interior;
    using clock = std::chrono::steady_clock;

    auto fault_here = [&](Stage st) {
      return opt.fault && opt.fault->worker == static_cast<int>(k) && opt.fault->step == step &&
             opt.fault->substage == sub && opt.fault->stage == st;
    };
    auto begin_stage = [&](Stage st) {
      current = st;
      if (fault_here(st) && !opt.fault->drop_message) throw std::runtime_error("injected fault");
    };
    auto wait = [&](int substep_index) {
      const auto t0 = clock::now();
      sync.arrive_and_wait();
      result.timings.at(substep_index, static_cast<int>(k), Stage::barrier) +=
          std::chrono::duration<double>(clock::now() - t0).count();
      // workers released together may read abort at different times, so a
      // leaving worker must stop counting toward the barriers others still reach
      if (!sh.abort.load()) return true;
      sync.arrive_and_drop();
      return false;
    };
    auto post = [&](detail::Mailbox& mb, std::vector<ConservedState>& payload) {
      std::lock_guard lk(mb.m);
      mb.msg = std::move(payload);
      mb.cv.notify_all();
    };
    auto receive = [&](detail::Mailbox& mb, std::vector<ConservedState>& into, int from, Edge edge) {
      std::unique_lock lk(mb.m);
      if (!mb.cv.wait_for(lk, opt.exchange_timeout, [&] { return mb.msg.has_value() || sh.abort.load(); }))
        throw DeadlockError("no ghost data from worker " + std::to_string(from) + " on the " + edge_name(edge) +
                            " edge of worker " + std::to_string(k) + " within " +
                            std::to_string(opt.exchange_timeout.count()) + " ms");
      if (!mb.msg) throw std::runtime_error("run aborted by another worker");
      into = std::move(*mb.msg);
      mb.msg.reset();
    };

    try {
      start_gate.arrive_and_wait();
      for (step = 0; step < steps; ++step) {
        const double dt = sh.dt;
        for (sub = 0; sub < s; ++sub) {
          const int idx = step * s + sub;
          auto& row = result.timings.samples[static_cast<std::size_t>(idx) * nw + k];

          begin_stage(Stage::interior);
          auto t0 = clock::now();
          compute_limiters(stage, limiters);
          residual(stage, geom, limiters, setup.residual, K[static_cast<std::size_t>(sub)], ws);
          if (sub + 1 < s) {
            stage_update(base, K, &tab.a[static_cast<std::size_t>((sub + 1) * s)], sub + 1, dt, geom, stage);
            validate_stage(stage, geom, gas, sub + 1);
          } else {
            stage_update(base, K, tab.b.data(), s, dt, geom, stage);
            validate_stage(stage, geom, gas, s);
            base.U = stage.U;
            t += dt;
            if (!sh.fixed_dt) sh.local_dt[k] = stable_dt(stage, geom, setup.cfl, gas, setup.residual.mode);
          }
          stage.ghosts_pending[static_cast<int>(Edge::west)] = has_west;
          stage.ghosts_pending[static_cast<int>(Edge::east)] = has_east;
          if (emu.mode == EmulationMode::paced) {
            pace_until(sh.release, emu.pace_seconds(slab.fast) * static_cast<double>(cells));
          } else if (emu.mode == EmulationMode::busy && !slab.fast) {
            burn(emu.busy_units_per_cell * cells);
          }
          row[0] = std::chrono::duration<double>(clock::now() - t0).count();
          if (!wait(idx)) return;

          begin_stage(Stage::boundary);
          t0 = clock::now();
          apply_boundary(stage, geom, bspec, gas);
          if (emu.mode == EmulationMode::paced)
            pace_until(sh.release, emu.boundary_factor * emu.pace_seconds(slab.fast) *
                                       static_cast<double>(boundary_cells));
          row[1] = std::chrono::duration<double>(clock::now() - t0).count();
          if (!wait(idx)) return;

          begin_stage(Stage::pack);
          t0 = clock::now();
          if (has_west) detail::pack_columns(stage, 0, send_west);
          if (has_east) detail::pack_columns(stage, stage.ni - kGhostDepth, send_east);
          row[2] = std::chrono::duration<double>(clock::now() - t0).count();
          if (!wait(idx)) return;

          begin_stage(Stage::exchange);
          t0 = clock::now();
          const bool drop = fault_here(Stage::exchange) && opt.fault->drop_message;
          if (!drop) {
            if (has_east) post(*sh.mail[2 * k], send_east);
            if (has_west) post(*sh.mail[2 * (k - 1) + 1], send_west);
          }
          if (has_west) receive(*sh.mail[2 * (k - 1)], recv_west, static_cast<int>(k) - 1, Edge::west);
          if (has_east) receive(*sh.mail[2 * k + 1], recv_east, static_cast<int>(k) + 1, Edge::east);
          row[3] = std::chrono::duration<double>(clock::now() - t0).count();
          if (!wait(idx)) return;

          begin_stage(Stage::unpack);
          t0 = clock::now();
          if (has_west) {
            detail::unpack_columns(stage, -kGhostDepth, recv_west);
            stage.ghosts_pending[static_cast<int>(Edge::west)] = false;
          }
          if (has_east) {
            detail::unpack_columns(stage, stage.ni, recv_east);
            stage.ghosts_pending[static_cast<int>(Edge::east)] = false;
          }
          row[4] = std::chrono::duration<double>(clock::now() - t0).count();
          if (!wait(idx)) return;
        }
      }
      sim_time[k] = t;
      blocks[k] = std::move(stage);
    } catch (...) {
      std::exception_ptr wrapped;
      try {
        std::rethrow_exception(std::current_exception());
      } catch (const std::exception& e) {
        wrapped = std::make_exception_ptr(WorkerError(static_cast<int>(k), current, step, sub, e.what()));
      } catch (...) {
        wrapped = std::make_exception_ptr(WorkerError(static_cast<int>(k), current, step, sub, "unknown error"));
      }
      sh.fail(wrapped);
      sync.arrive_and_drop();
    }
  };

  const auto t_start = std::chrono::steady_clock::now();
  {
    std::vector<std::jthread> threads;
    threads.reserve(nw);
    for (std::size_t k = 0; k < nw; ++k) threads.emplace_back(worker, k);
  }
  result.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (sh.first_error) std::rethrow_exception(sh.first_error);

  result.solution = Array2D<ConservedState>(0, setup.ni(), 0, setup.nj());
  for (std::size_t k = 0; k < nw; ++k)
    for (int j = 0; j < setup.nj(); ++j)
      for (int i = 0; i < blocks[k].ni; ++i) result.solution(blocks[k].i_begin + i, j) = blocks[k].U(i, j);
  result.steps = steps;
  result.substeps = steps * s;
  result.sim_time = nw > 0 ? sim_time[0] : 0.0;
  result.barrier_count = sh.barrier_count;
  result.residual_calls = static_cast<long>(steps) * s;
  return result;
}

// Largest difference between two gathered solutions, each component scaled
// by its largest magnitude over both fields.
inline double max_relative_difference(const Array2D<ConservedState>& a, const Array2D<ConservedState>& b) {
  if (a.i_lo() != b.i_lo() || a.i_hi() != b.i_hi() || a.j_lo() != b.j_lo() || a.j_hi() != b.j_hi())
    throw std::invalid_argument("compare: solution shapes differ");
  std::array<double, kNumVars> scale{};
  for (const auto* f : {&a, &b})
    for (const auto& q : *f)
      for (std::size_t k = 0; k < kNumVars; ++k) scale[k] = std::max(scale[k], std::abs(q[k]));
  double worst = 0.0;
  auto ia = a.begin();
  for (auto ib = b.begin(); ib != b.end(); ++ia, ++ib)
    for (std::size_t k = 0; k < kNumVars; ++k)
      if (scale[k] > 0.0) worst = std::max(worst, std::abs((*ia)[k] - (*ib)[k]) / scale[k]);
  return worst;
}

}  // namespace hfv
