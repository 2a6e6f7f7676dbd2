#include "dynamics.hpp"
#include "error.hpp"
#include "hill.hpp"
#include "stark_zeeman.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sectionscope;

namespace {

// Earth-Moon collinear points and energies, 40-digit bisection done offline.
constexpr double kL1x = -0.83691512581971246833;
constexpr double kL2x = -1.1556821654078692025;
constexpr double kL3x = 1.0050626458062680602;
constexpr double kHL1 = -1.5941705588302462253;

// Independent bisection on dU/dq1 along the axis, written out from scratch.
double oracle_axis_root(double mu, double lo, double hi) {
  const double m1 = -1.0 + mu, e1 = mu;
  auto g = [&](double x) {
    const double am = std::abs(x - m1), ae = std::abs(x - e1);
    return mu * (x - m1) / (am * am * am) + (1.0 - mu) * (x - e1) / (ae * ae * ae) - x;
  };
  double fa = g(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) > 0.0) == (fa > 0.0)) {
      lo = mid;
      fa = g(mid);
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

RotState random_state(std::mt19937_64& rng, const MassRatio& mu) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (;;) {
    RotState s{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))};
    if ((s.q - mu.earth()).norm() > 0.05 && (s.q - mu.moon()).norm() > 0.05) return s;
  }
}

}  // namespace

TEST(Hamiltonian, KeplerCircleHandValue) {
  const RotState s{Vec3(1, 0, 0), Vec3(0, 1, 0)};
  EXPECT_NEAR(hamiltonian_rot(s, MassRatio(0.0)), -1.5, 1e-15);
}

TEST(Hamiltonian, EqualMassesAboveBarycenter) {
  const RotState s{Vec3(0, 0, 1), Vec3::Zero()};
  EXPECT_NEAR(hamiltonian_rot(s, MassRatio(0.5)), -1.0 / std::sqrt(1.25), 1e-15);
}

TEST(Hamiltonian, CollisionInputRejected) {
  const MassRatio mu(0.3);
  try {
    hamiltonian_rot({mu.moon(), Vec3::Zero()}, mu);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCollision);
  }
}

TEST(Hamiltonian, MasslessPrimaryIsNotSingular) {
  const MassRatio mu(0.0);
  EXPECT_NO_THROW(hamiltonian_rot({mu.moon(), Vec3(0, 1, 0)}, mu));
}

TEST(Hamiltonian, AnalyticGradientMatchesCentralDifferences) {
  std::mt19937_64 rng(11);
  const MassRatio mu(kEarthMoonMu);
  const double h = 1e-6;
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const RotState s = random_state(rng, mu);
    const Vec6 grad = hamiltonian_gradient(s, mu);
    Vec6 fd;
    for (int i = 0; i < 6; ++i) {
      Vec6 a = s.packed(), b = s.packed();
      a[i] += h;
      b[i] -= h;
      fd[i] = (hamiltonian_rot(RotState::unpack(a), mu) - hamiltonian_rot(RotState::unpack(b), mu)) / (2 * h);
    }
    worst = std::max(worst, (grad - fd).norm() / grad.norm());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Hamiltonian, VectorFieldVanishesAtLagrangePoints) {
  for (double m : {kEarthMoonMu, 0.1, 0.3, 0.5}) {
    const MassRatio mu(m);
    const auto lp = lagrange_points(mu);
    for (int i = 0; i < 5; ++i) EXPECT_LT(hamiltonian_vector_field(lp.state(i), mu).norm(), 1e-10) << m << " L" << i + 1;
  }
}

TEST(EffectivePotential, EqualMassesAtOrigin) {
  EXPECT_NEAR(effective_potential(Vec3::Zero(), MassRatio(0.5)), -2.0, 1e-15);
}

TEST(EffectivePotential, LowerBoundOfHamiltonian) {
  std::mt19937_64 rng(5);
  const MassRatio mu(kEarthMoonMu);
  for (int n = 0; n < 1000; ++n) {
    const RotState s = random_state(rng, mu);
    EXPECT_GE(hamiltonian_rot(s, mu) - effective_potential(s.q, mu), -1e-14);
    EXPECT_NEAR(hamiltonian_rot({s.q, rest_momentum(s.q)}, mu), effective_potential(s.q, mu), 1e-13);
  }
}

TEST(Lagrange, EqualMassesL1AtOrigin) {
  const auto lp = lagrange_points(MassRatio(0.5));
  EXPECT_LT(lp.points[0].norm(), 1e-10);
}

TEST(Lagrange, OrderingForMuBelowHalf) {
  for (double m : {0.1, 0.2, 0.3, 0.4}) {
    const auto lp = lagrange_points(MassRatio(m));
    EXPECT_TRUE(lp.ordering_ok(1e-12)) << m;
    EXPECT_LT(lp.energies[0], lp.energies[1]);
    EXPECT_LT(lp.energies[1], lp.energies[2]);
    EXPECT_LT(lp.energies[2], lp.energies[3]);
    EXPECT_LT(std::abs(lp.energies[3] - lp.energies[4]), 1e-12);
    for (double g : lp.gradient_norms) EXPECT_LT(g, 1e-12);
  }
}

TEST(Lagrange, EarthMoonCollinearPointsMatchOracle) {
  const MassRatio mu(kEarthMoonMu);
  const auto lp = lagrange_points(mu);
  const double l1 = oracle_axis_root(mu.value(), mu.moon().x() + 1e-9, mu.earth().x() - 1e-9);
  EXPECT_NEAR(lp.points[0].x(), l1, 1e-12);
  EXPECT_NEAR(lp.points[0].x(), kL1x, 1e-12);
  EXPECT_NEAR(lp.points[1].x(), kL2x, 1e-12);
  EXPECT_NEAR(lp.points[2].x(), kL3x, 1e-12);
  EXPECT_NEAR(lp.energies[0], kHL1, 1e-12);
  EXPECT_NEAR(effective_potential(lp.points[0], mu), hamiltonian_rot(lp.state(0), mu), 1e-15);
}

TEST(Lagrange, TriangularPointsAreEquilateral) {
  const MassRatio mu(0.2);
  const auto lp = lagrange_points(mu);
  for (int i = 3; i < 5; ++i) {
    EXPECT_NEAR((lp.points[i] - mu.earth()).norm(), 1.0, 1e-12);
    EXPECT_NEAR((lp.points[i] - mu.moon()).norm(), 1.0, 1e-12);
  }
}

TEST(Lagrange, RejectsDegenerateMu) {
  for (double m : {0.0, 1.0}) {
    try {
      lagrange_points(MassRatio(m));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    }
  }
  EXPECT_THROW(MassRatio(-0.1), Error);
}

TEST(Hill, MembershipExamples) {
  const MassRatio mu(0.3);
  const auto lp = lagrange_points(mu);
  EXPECT_TRUE(hill_membership(mu.earth() + Vec3(1e-6, 0, 0), -3.0, mu));
  EXPECT_FALSE(hill_membership(lp.points[0], lp.energies[0] - 0.05, mu));
}

TEST(Hill, MembershipEquivalentToReachableEnergy) {
  // exists p with H(q, p) = c  <=>  min_p H <= c; minimize by Newton in p.
  std::mt19937_64 rng(3);
  const MassRatio mu(kEarthMoonMu);
  std::uniform_real_distribution<double> uc(-2.0, -1.4);
  for (int n = 0; n < 500; ++n) {
    const RotState s = random_state(rng, mu);
    const double c = uc(rng);
    Vec3 p = s.p;
    for (int k = 0; k < 3; ++k) p -= hamiltonian_gradient({s.q, p}, mu).tail<3>();  // Hessian in p is I
    const double hmin = hamiltonian_rot({s.q, p}, mu);
    EXPECT_EQ(hill_membership(s.q, c, mu), hmin <= c);
  }
}

TEST(Hill, ThreeComponentsBelowL1) {
  const MassRatio mu(kEarthMoonMu);
  const double hl1 = lagrange_points(mu).energies[0];
  const auto g = hill_components(hl1 - 0.1, mu, GridBox{}, 256, true);
  EXPECT_EQ(g.components, 3);
  EXPECT_EQ(g.bounded_count(), 2);
  EXPECT_FALSE(g.resolution_warning);
}

TEST(Hill, TwoComponentsBetweenL1AndL2) {
  const MassRatio mu(kEarthMoonMu);
  const auto lp = lagrange_points(mu);
  const auto g = hill_components(0.5 * (lp.energies[0] + lp.energies[1]), mu, GridBox{}, 256, true);
  EXPECT_EQ(g.components, 2);
  EXPECT_EQ(g.bounded_count(), 1);
}

TEST(Hill, DeepWellsStaySeparate) {
  const MassRatio mu(kEarthMoonMu);
  GridBox box{Vec3(-5, -5, -5), Vec3(5, 5, 5)};
  const auto g = hill_components(-10.0, mu, box, 128, true);
  EXPECT_EQ(g.components, 3);
  EXPECT_EQ(g.bounded_count(), 2);
}

TEST(Hill, SpatialGridAgreesBelowL1) {
  const MassRatio mu(kEarthMoonMu);
  const double hl1 = lagrange_points(mu).energies[0];
  const auto g = hill_components(hl1 - 0.1, mu, GridBox{}, 64, false, false);
  EXPECT_EQ(g.components, 3);
}

TEST(Hill, CoarseGridWarns) {
  // Just above H(L1) the neck is far thinner than a 16-cell grid resolves.
  const MassRatio mu(kEarthMoonMu);
  const double hl1 = lagrange_points(mu).energies[0];
  const auto g = hill_components(hl1 + 1e-4, mu, GridBox{}, 16, true);
  EXPECT_TRUE(g.resolution_checked);
  EXPECT_TRUE(g.resolution_warning || g.components_at_double == g.components);
}

TEST(StarkZeeman, Cr3bpSatisfiesAssumptions) {
  for (Primary pr : {Primary::kMoon, Primary::kEarth}) {
    const auto sys = cr3bp_stark_zeeman(MassRatio(kEarthMoonMu), -1.7, pr);
    const auto rep = check_assumptions(sys, 2000, 7, 0.5);
    EXPECT_TRUE(rep.ok()) << rep.failed;
    EXPECT_TRUE(rep.identity_checked);
    EXPECT_LT(rep.identity_max_error, 1e-12);
  }
}

TEST(StarkZeeman, Cr3bpMatchesRotatingHamiltonian) {
  // The chart Hamiltonian in primary-centered coordinates equals H up to the
  // constant gauge shift in A, which changes p but not the energy.
  const MassRatio mu(kEarthMoonMu);
  const auto sys = cr3bp_stark_zeeman(mu, -1.7, Primary::kMoon);
  std::mt19937_64 rng(9);
  for (int n = 0; n < 100; ++n) {
    const RotState s = random_state(rng, mu);
    const Vec3 y = s.q - mu.moon();
    EXPECT_NEAR(sys.hamiltonian(y, s.p), hamiltonian_rot(s, mu), 1e-12);
  }
}

TEST(StarkZeeman, OddPotentialViolatesSymmetry) {
  StarkZeemanSystem sys;
  sys.g = 1.0;
  sys.v1 = [](const Vec3& q) { return q.z(); };
  sys.v1_gradient = [](const Vec3&) { return Vec3(0, 0, 1); };
  sys.magnetic = [](const Vec3& q) { return Vec3(q.y(), -q.x(), 0.0); };
  const auto rep = check_assumptions(sys, 200);
  EXPECT_FALSE(rep.symmetry_ok);
  EXPECT_EQ(rep.failed, "A2");
  EXPECT_GT(rep.witness_value, 0.0);
}

TEST(StarkZeeman, VerticalMagneticComponentViolatesA2) {
  StarkZeemanSystem sys;
  sys.g = 1.0;
  sys.v1 = [](const Vec3&) { return 0.0; };
  sys.v1_gradient = [](const Vec3&) { return Vec3::Zero(); };
  sys.magnetic = [](const Vec3& q) { return Vec3(q.z(), 0.0, 0.0); };
  const auto rep = check_assumptions(sys, 50);
  EXPECT_FALSE(rep.magnetic_ok);
}

TEST(StarkZeeman, StrongVerticalWellViolatesA3) {
  // F = g/|q|^3 - 2e6; with g = 1e-3 this is negative once |q| > (g/2e6)^(1/3) ~ 8e-4.
  StarkZeemanSystem sys;
  sys.g = 1e-3;
  sys.v1 = [](const Vec3& q) { return -1e6 * q.z() * q.z(); };
  sys.v1_gradient = [](const Vec3& q) { return Vec3(0, 0, -2e6 * q.z()); };
  sys.magnetic = [](const Vec3&) { return Vec3::Zero(); };
  const auto rep = check_assumptions(sys, 100);
  EXPECT_FALSE(rep.positivity_ok);
  EXPECT_EQ(rep.failed, "A3");
  EXPECT_LT(sys.vertical_stiffness(rep.witness), 0.0);
  // The transversality value at the witness with p3 = 0 is F itself.
  EXPECT_LT(sys.transversality(rep.witness, Vec3::Zero()), 0.0);
}

TEST(StarkZeeman, TransversalityOnEquatorIsOne) {
  const auto sys = cr3bp_stark_zeeman(MassRatio(kEarthMoonMu), -1.7);
  EXPECT_DOUBLE_EQ(sys.transversality(Vec3(0.1, 0.05, 0.0), Vec3(0.3, -0.2, 0.7)), 1.0);
  EXPECT_THROW(sys.transversality(Vec3(0.1, 0.05, 0.0), Vec3(0.3, -0.2, 0.0)), Error);
}
