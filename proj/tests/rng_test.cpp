#include "paraplan/rng.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "paraplan/planner.hpp"

namespace paraplan {
namespace {

TEST(KeyedRng, SameKeyReproducesTheStream) {
  KeyedRng a(42, 7, 3, 1, 99);
  KeyedRng b(42, 7, 3, 1, 99);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
  }
  KeyedRng c(42, 7, 3, 1, 99);
  KeyedRng d(42, 7, 3, 1, 99);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(c.next_normal(), d.next_normal());
    EXPECT_EQ(c.next_unit(), d.next_unit());
  }
}

TEST(KeyedRng, DistinctKeysDecorrelate) {
  KeyedRng a(42, 7, 3, 1, 99);
  KeyedRng b(42, 7, 3, 1, 100);
  KeyedRng c(42, 8, 3, 1, 99);
  int equal_ab = 0;
  int equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next_u64();
    if (va == b.next_u64()) ++equal_ab;
    if (va == c.next_u64()) ++equal_ac;
  }
  EXPECT_EQ(equal_ab, 0);
  EXPECT_EQ(equal_ac, 0);
}

TEST(KeyedRng, UnitDrawsStayInHalfOpenInterval) {
  KeyedRng rng(1, 2, 3, 4, 5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(KeyedRng, NormalMomentsLookStandard) {
  KeyedRng rng(11, 0, 0, 0, 0);
  const int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(SampleCandidate, CandidateZeroIsTheCenter) {
  PlannerConfig cfg;
  cfg.n_candidates = 4;
  const Planner planner({}, MlpArchitecture{{5, 2, 2}}, cfg);
  std::vector<double> center(planner.param_count(), 0.75);
  std::vector<double> out(planner.param_count());
  planner.sample_candidate(out, center, 12, 4, 0, 0);
  EXPECT_EQ(out, center);
}

TEST(SampleCandidate, IdenticalKeysReproduceIdenticalCandidates) {
  PlannerConfig cfg;
  const Planner planner({}, MlpArchitecture{{5, 10, 2}}, cfg);
  std::vector<double> center(planner.param_count(), -0.2);
  std::vector<double> a(planner.param_count());
  std::vector<double> b(planner.param_count());
  for (int c : {1, 2, 17, 1000}) {
    planner.sample_candidate(a, center, 3, 1, 0, c);
    planner.sample_candidate(b, center, 3, 1, 0, c);
    EXPECT_EQ(a, b);
    planner.sample_candidate(b, center, 3, 1, 0, c + 1);
    EXPECT_NE(a, b);
  }
}

TEST(SampleCandidate, SigmaStaysInsideConfiguredDecades) {
  PlannerConfig cfg;
  cfg.sigma_log_low = -2.0;
  cfg.sigma_log_high = 1.0;
  const Planner planner({}, MlpArchitecture{{5, 2, 2}}, cfg);
  for (int c = 1; c <= 2000; ++c) {
    const double sigma = planner.perturbation_sigma(0, 0, 0, c);
    EXPECT_GE(sigma, 0.01);
    EXPECT_LE(sigma, 10.0);
  }
}

}  // namespace
}  // namespace paraplan
