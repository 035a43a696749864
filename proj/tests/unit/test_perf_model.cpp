#include <gtest/gtest.h>

#include <random>

#include "hfv/perf_model.hpp"
#include "test_support.hpp"

using namespace hfv::perf;
using testsupport::rel;

namespace {

PerfParams interior_only(double t_I) {
  PerfParams p;
  p.t_I = t_I;
  return p;
}

PerfParams aggregated(double t_I, double beta, double alpha, double r_gc) {
  PerfParams p;
  p.t_I = t_I;
  p.beta = beta;
  p.t_B = beta * t_I;
  p.alpha = alpha;
  p.r_gc = r_gc;
  return p;
}

// Stage timings a run would report if the aggregated model were exact.
CalibrationRun synthesize(const ProblemShape& s, int G, int C, const PerfParams& truth, double n_int = 1.0,
                          double n_bnd = 1.0, double n_tot = 1.0) {
  CalibrationRun r;
  r.label = "G" + std::to_string(G) + "C" + std::to_string(C);
  r.shape = s;
  r.G = G;
  r.C = C;
  const double units = G * truth.r_gc + C;
  r.interior_s = s.N_l * s.N_w / units * truth.t_I * n_int;
  r.boundary_s = (2.0 * s.N_w + 2.0 * s.N_l / units) * truth.beta * truth.t_I * n_bnd;
  r.total_s = time_hetero(s, G, C, truth) * n_tot;
  return r;
}

}  // namespace

// ---- closed-form examples

TEST(Sequential, InteriorOnly) {
  EXPECT_NEAR(time_sequential({100, 100, 1}, interior_only(1e-6)), 0.01, 1e-17);
}

TEST(Sequential, WithBoundary) {
  PerfParams p = interior_only(1e-6);
  p.t_B = 3e-7;
  EXPECT_NEAR(time_sequential({10, 10, 1}, p), 1.72e-4, 1e-18);
}

TEST(Sequential, SynchronisationAddsFiveBarriers) {
  PerfParams p = interior_only(1e-6);
  p.t_B = 3e-7;
  const double base = time_sequential({10, 10, 1}, p);
  p.t_S = 1e-5;
  EXPECT_NEAR(time_sequential({10, 10, 1}, p) - base, 5e-5, 1e-18);
}

TEST(Sequential, PlanarAccountingDropsOutOfPlaneFaces) {
  PerfParams p = interior_only(0.0);
  p.t_B = 1.0;
  EXPECT_DOUBLE_EQ(time_sequential({10, 10, 1}, p, BoundaryAccounting::planar), 40.0);
  EXPECT_DOUBLE_EQ(time_sequential({10, 10, 1}, p, BoundaryAccounting::full), 240.0);
}

TEST(MultiCpu, HandEvaluation) {
  PerfParams p = interior_only(1e-6);
  p.t_B = 0.3e-6;
  EXPECT_NEAR(time_multi_cpu({1000, 100, 1}, 8, p), 0.012635, 1e-15);
}

TEST(MultiCpu, SingleWorkerIsPlanarSequential) {
  PerfParams p = aggregated(2e-6, 0.3, 0.0, 1.0);
  p.t_S = 1e-5;
  p.t_DH = 2e-6;
  const ProblemShape s{300, 70, 1};
  EXPECT_NEAR(time_multi_cpu(s, 1, p), time_sequential(s, p, BoundaryAccounting::planar), 1e-15);
}

TEST(MultiCpu, DoublingWorkersHalvesInterior) {
  const ProblemShape s{640, 320, 1};
  const PerfParams p = interior_only(1e-6);
  EXPECT_DOUBLE_EQ(time_multi_cpu(s, 8, p), 0.5 * time_multi_cpu(s, 4, p));
  EXPECT_THROW(time_multi_cpu(s, 0, p), std::invalid_argument);
}

TEST(MultiGpu, HandEvaluation) {
  PerfParams p = interior_only(1e-6);
  p.r_gc = 40.0;
  EXPECT_NEAR(time_multi_gpu({1000, 100, 1}, 1, p), 2.5e-3, 1e-17);
}

TEST(MultiGpu, UnitRatioIsMultiCpu) {
  PerfParams p = aggregated(1e-6, 0.3, 0.0, 1.0);
  p.t_S = 3e-6;
  for (int n : {1, 2, 5}) EXPECT_DOUBLE_EQ(time_multi_gpu({400, 100, 1}, n, p), time_multi_cpu({400, 100, 1}, n, p));
}

TEST(MultiGpu, InteriorDecreasesWithRatio) {
  double prev = 1e300;
  for (double r = 1.0; r <= 64.0; r *= 1.5) {
    PerfParams p = interior_only(1e-6);
    p.r_gc = r;
    const double t = time_multi_gpu({1000, 100, 1}, 2, p);
    EXPECT_LT(t, prev);
    prev = t;
  }
}

TEST(Hetero, HandEvaluation) {
  EXPECT_NEAR(time_hetero({1000, 100, 1}, 1, 0, aggregated(1e-6, 0.25, 1.0, 40.0)), 2.625e-3, 1e-17);
}

TEST(Hetero, BoundaryFreeLimit) {
  const PerfParams p = aggregated(1e-6, 0.0, 0.0, 8.0);
  EXPECT_DOUBLE_EQ(time_hetero({960, 240, 1}, 2, 5, p), 960.0 * 240.0 * 1e-6 / 21.0);
}

TEST(Hetero, RejectsEmptyPool) {
  EXPECT_THROW(time_hetero({10, 10, 1}, 0, 0, aggregated(1e-6, 0.3, 0.1, 2.0)), std::invalid_argument);
}

TEST(Speedup, BoundaryFreeMatchesPaperScale) {
  const PerfParams p = aggregated(1e-6, 0.0, 0.0, 40.0);
  EXPECT_NEAR(predict_speedup_vs_pure_fast({1000, 100, 1}, 1, 8, p), 1.2, 1e-14);
  EXPECT_DOUBLE_EQ(predict_speedup_vs_pure_fast({1000, 100, 1}, 1, 0, aggregated(1e-6, 0.3, 0.5, 40.0)), 1.0);
}

TEST(Speedup, DecreasesWithBeta) {
  double prev = 1e300;
  for (double beta = 0.0; beta <= 1.0; beta += 0.05) {
    const double s = predict_speedup_vs_pure_fast({400, 100, 1}, 1, 8, aggregated(1e-6, beta, 0.5, 40.0));
    EXPECT_LT(s, prev);
    EXPECT_GT(s, 1.0);
    prev = s;
  }
}

TEST(OptimalRatio, EqualsSpeedRatio) {
  EXPECT_DOUBLE_EQ(predict_optimal_ratio(aggregated(1e-6, 0.3, 0.1, 40.0), 1, 8).W, 40.0);
  EXPECT_DOUBLE_EQ(predict_optimal_ratio(aggregated(1e-6, 0.3, 0.1, 1.0), 1, 8).W, 1.0);
  EXPECT_FALSE(predict_optimal_ratio(aggregated(1e-6, 0.3, 0.1, 8.0), 1, 4).note.empty());
}

// ---- properties

TEST(PerfProperty, DegeneracyIdentities) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> len(1.0, 5000.0), b(0.05, 1.0), a(0.0, 3.0), r(1.0, 100.0), t(1e-9, 1e-4);
  std::uniform_int_distribution<int> n(1, 64);
  for (int k = 0; k < 1000; ++k) {
    const ProblemShape s{std::round(len(rng)), std::round(len(rng)), 1};
    const PerfParams p = aggregated(t(rng), b(rng), a(rng), r(rng));
    const int G = n(rng), C = n(rng);
    ASSERT_LE(rel(time_hetero(s, G, 0, p), time_multi_gpu_aggregated(s, G, p)), 1e-14);
    ASSERT_LE(rel(time_hetero(s, 0, C, p), time_multi_cpu_aggregated(s, C, p)), 1e-14);
    // the raw forms with t_B = (1 + alpha) beta t_I and no separate overheads
    PerfParams raw = p;
    raw.t_B = (1.0 + p.alpha) * p.beta * p.t_I;
    ASSERT_LE(rel(time_hetero(s, 0, C, p), time_multi_cpu(s, C, raw)), 1e-14);
    ASSERT_LE(rel(time_hetero(s, G, 0, p), time_multi_gpu(s, G, raw)), 1e-14);
  }
}

TEST(PerfProperty, StrictlyDecreasingInResources) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> b(0.05, 1.0), a(0.0, 3.0), r(1.0, 50.0);
  std::uniform_int_distribution<int> n(0, 16);
  for (int k = 0; k < 500; ++k) {
    const ProblemShape s{512, 128, 1};
    const PerfParams p = aggregated(1e-6, b(rng), a(rng), r(rng));
    int G = n(rng), C = n(rng);
    if (G + C == 0) C = 1;
    const double t = time_hetero(s, G, C, p);
    ASSERT_LT(time_hetero(s, G + 1, C, p), t);
    ASSERT_LT(time_hetero(s, G, C + 1, p), t);
    if (G > 0) {
      PerfParams faster = p;
      faster.r_gc *= 1.1;
      ASSERT_LT(time_hetero(s, G, C, faster), t);
    }
  }
}

TEST(PerfProperty, SequentialIsLinearInEachTerm) {
  const ProblemShape s{37, 19, 3};
  const PerfParams zero{};
  double PerfParams::*fields[] = {&PerfParams::t_I, &PerfParams::t_B, &PerfParams::t_S,
                                  &PerfParams::t_DH, &PerfParams::t_HH, &PerfParams::t_HD};
  PerfParams all{};
  for (std::size_t k = 0; k < std::size(fields); ++k) all.*fields[k] = 1e-6 * static_cast<double>(k + 1);
  double sum = 0.0;
  for (auto f : fields) {
    PerfParams one{}, two{};
    one.*f = all.*f;
    two.*f = 2.0 * all.*f;
    const double t1 = time_sequential(s, one);
    EXPECT_GT(t1, 0.0);
    EXPECT_NEAR(time_sequential(s, two), 2.0 * t1, 1e-15 * t1);
    sum += t1;
  }
  EXPECT_NEAR(time_sequential(s, all), sum, 1e-14 * sum);
  EXPECT_EQ(time_sequential(s, zero), 0.0);
}

// ---- calibration

TEST(Calibrate, NoiselessRoundTrip) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> b(0.1, 0.9), a(0.0, 2.0), r(1.5, 60.0), t(1e-8, 1e-5);
  for (int k = 0; k < 200; ++k) {
    const PerfParams truth = aggregated(t(rng), b(rng), a(rng), r(rng));
    const ProblemShape s{192, 48, 1};
    std::vector<CalibrationRun> runs{synthesize(s, 0, 1, truth), synthesize(s, 1, 0, truth),
                                     synthesize(s, 1, 4, truth), synthesize(s, 2, 3, truth)};
    std::string slow, fast;
    const PerfParams p = calibrate(runs, &slow, &fast);
    ASSERT_LE(rel(p.t_I, truth.t_I), 1e-10);
    ASSERT_LE(rel(p.beta, truth.beta), 1e-10);
    ASSERT_LE(rel(p.r_gc, truth.r_gc), 1e-10);
    ASSERT_LE(std::abs(p.alpha - truth.alpha), 1e-10 * std::max(1.0, truth.alpha));
    EXPECT_EQ(slow, "G0C1");
    EXPECT_EQ(fast, "G1C0");
  }
}

// The fit only sees alpha through the boundary-and-overhead residue, so its
// noise sensitivity grows with the interior share of each run. Small grids keep
// that residue comparable to the interior time.
TEST(Calibrate, AlphaToleratesFivePercentNoise) {
  const PerfParams truth = aggregated(1e-6, 0.4, 1.0, 8.0);
  const ProblemShape s{8, 8, 1};
  int worst_seed = -1;
  double worst = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(static_cast<unsigned>(seed));
    std::uniform_real_distribution<double> noise(0.95, 1.05);
    std::vector<CalibrationRun> runs;
    runs.push_back(synthesize(s, 0, 1, truth, noise(rng), noise(rng), noise(rng)));
    runs.push_back(synthesize(s, 1, 0, truth, noise(rng), noise(rng), noise(rng)));
    for (int k = 0; k < 40; ++k) runs.push_back(synthesize(s, 1 + k % 3, 1 + k % 7, truth, noise(rng), noise(rng), noise(rng)));
    const double err = std::abs(calibrate(runs).alpha / truth.alpha - 1.0);
    if (err > worst) worst = err, worst_seed = seed;
  }
  EXPECT_LE(worst, 0.30) << "seed " << worst_seed;
}

TEST(Calibrate, BetaOutsideTypicalRangeWarns) {
  const ProblemShape s{64, 64, 1};
  for (double beta : {0.1, 0.7, 1.5}) {
    const PerfParams truth = aggregated(1e-6, beta, 0.2, 4.0);
    PerfParams p;
    ASSERT_NO_THROW(p = calibrate({synthesize(s, 0, 1, truth), synthesize(s, 1, 0, truth)}));
    ASSERT_EQ(p.warnings.size(), 1u);
    EXPECT_NE(p.warnings[0].find("beta"), std::string::npos);
  }
  const PerfParams typical = aggregated(1e-6, 0.3, 0.2, 4.0);
  EXPECT_TRUE(calibrate({synthesize(s, 0, 1, typical), synthesize(s, 1, 0, typical)}).warnings.empty());
  EXPECT_NE(beta_warnings(1.5)[0].find("sanity"), std::string::npos);
  EXPECT_NE(beta_warnings(0.7)[0].find("typical"), std::string::npos);
}

TEST(Calibrate, MissingRunsAreErrors) {
  const PerfParams truth = aggregated(1e-6, 0.3, 0.2, 4.0);
  const ProblemShape s{64, 64, 1};
  EXPECT_THROW(calibrate({synthesize(s, 1, 0, truth), synthesize(s, 1, 2, truth)}), std::invalid_argument);
  EXPECT_THROW(calibrate({synthesize(s, 0, 1, truth), synthesize(s, 1, 2, truth)}), std::invalid_argument);
  EXPECT_THROW(calibrate({}), std::invalid_argument);
}

TEST(Calibrate, AlphaIsClampedAtZero) {
  const PerfParams truth = aggregated(1e-6, 0.3, 0.0, 4.0);
  const ProblemShape s{64, 64, 1};
  std::vector<CalibrationRun> runs{synthesize(s, 0, 1, truth), synthesize(s, 1, 0, truth)};
  for (auto& r : runs) r.total_s *= 0.9;  // faster than the model allows
  EXPECT_EQ(calibrate(runs).alpha, 0.0);
}
