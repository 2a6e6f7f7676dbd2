#include "dynamics.hpp"
#include "stark_zeeman.hpp"
#include "verify.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sectionscope;

namespace {

double earth_moon_c() { return lagrange_points(MassRatio(kEarthMoonMu)).energies[0] - 0.1; }

}  // namespace

TEST(Verify, ChartRoundTrips) {
  const RoundTripReport r = chart_round_trips(2000, 3);
  EXPECT_EQ(r.samples, 2000);
  EXPECT_LT(r.max(), 1e-12);
}

TEST(Verify, KeplerOracles) {
  const KeplerOracleReport r = kepler_oracles(10, 5);
  EXPECT_LT(r.planarity, 1e-8);
  EXPECT_LT(r.period_spread, 1e-8);
  EXPECT_NEAR(r.mean_period, kTwoPi, 1e-8);
}

TEST(Verify, HausdorffOfShiftedCurves) {
  std::vector<Vec6> a, b;
  for (int i = 0; i <= 1000; ++i) {
    Vec6 x = Vec6::Zero();
    x[0] = std::cos(kTwoPi * i / 1000);
    x[1] = std::sin(kTwoPi * i / 1000);
    a.push_back(x);
    x[2] = 1e-3;
    if (i % 3 == 0) b.push_back(x);  // coarser sampling of the lifted circle
  }
  EXPECT_NEAR(curve_hausdorff(a, b), 1e-3, 1e-4);
  EXPECT_LT(curve_hausdorff(a, a), 1e-15);
}

TEST(Verify, RegularizedAndDirectTrajectoriesCoincide) {
  const CorrespondenceReport r = regularization_correspondence(MassRatio(kEarthMoonMu), earth_moon_c(), 100, 11);
  EXPECT_LT(r.level_residual, 1e-10);
  EXPECT_LT(r.hausdorff, 1e-6);
  EXPECT_GT(r.return_time, 0.0);
  EXPECT_GE(r.min_distance, 1e-3);
}

TEST(Verify, TransversalityPositiveOnBothComponents) {
  const TransversalitySampleReport r = transversality_sampling(MassRatio(kEarthMoonMu), earth_moon_c(), 4000, 9);
  EXPECT_EQ(r.samples, 4000u);
  EXPECT_EQ(r.nonpositive, 0u);
  EXPECT_GT(r.min_value, 0.0);
}

TEST(Verify, EnergyDriftAtTightTolerance) {
  const DriftReport r =
      energy_drift_study(MassRatio(kEarthMoonMu), earth_moon_c(), 4, 100.0, IntegratorConfig{}, 2);
  EXPECT_LT(r.max_drift, 1e-9);
}

TEST(Verify, LooseToleranceShowsDrift) {
  IntegratorConfig cfg;
  cfg.rel_tol = cfg.abs_tol = 1e-8;
  const DriftReport r = energy_drift_study(MassRatio(kEarthMoonMu), earth_moon_c(), 2, 100.0, cfg, 2);
  EXPECT_GT(r.max_drift, 1e-9);
}

TEST(Verify, A3FixtureFailsWithWitness) {
  const AssumptionReport rep = check_assumptions(a3_violation_fixture(), 200);
  EXPECT_EQ(rep.failed, "A3");
  EXPECT_LT(rep.witness_value, 0.0);
}
