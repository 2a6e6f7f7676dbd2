#include "dynamics.hpp"
#include "error.hpp"
#include "flow.hpp"
#include "orbits.hpp"
#include "return_map.hpp"
#include "sections.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sectionscope;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

// Vertical collision orbit at mu = 0: apex (0, 0, 1/2), rest, H = -2, Kepler period pi/4.
RotState vertical_apex() { return {Vec3(0, 0, 0.5), Vec3::Zero()}; }

// Nudges a page point within the page and the energy shell.
RotState nudge(const MassRatio& mu, const RotState& x, const SectionSpec& spec, double eps) {
  const PageChart chart(mu, x, hamiltonian_rot(x, mu), spec);
  return chart.point(Eigen::Vector4d(eps, -eps, 0.5 * eps, eps));
}

double l1_energy(double mu) { return lagrange_points(MassRatio(mu)).energies[0]; }

}  // namespace

TEST(PeriodicPoint, VerticalCollisionOrbitPageZero) {
  const MassRatio mu(0.0);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const SectionSpec spec{AngleKind::kPhysical, 0.0};
  const RotState x0 = nudge(mu, vertical_apex(), spec, 1e-3);
  const PeriodicOrbit o = find_periodic_point(flow, x0, 1, spec);
  EXPECT_LT(o.residual, 1e-10);
  EXPECT_LT((o.representative.packed() - vertical_apex().packed()).norm(), 1e-8);
  EXPECT_NEAR(o.period, kPi / 4, 1e-9);
  EXPECT_NEAR(o.energy, -2.0, 1e-6);
  // quadratic tail: each residual roughly squares once small
  const auto& h = o.newton_history;
  ASSERT_GE(h.size(), 3u);
  for (size_t i = 1; i < h.size(); ++i) {
    if (h[i - 1] < 1e-3 && h[i - 1] > 1e-7) EXPECT_LT(h[i], 100.0 * h[i - 1] * h[i - 1]) << "iteration " << i;
  }
}

TEST(PeriodicPoint, VerticalCollisionOrbitPagePi) {
  const MassRatio mu(0.0);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const SectionSpec spec{AngleKind::kPhysical, kPi};
  const RotState apex{Vec3(0, 0, -0.5), Vec3::Zero()};
  const PeriodicOrbit o = find_periodic_point(flow, nudge(mu, apex, spec, 1e-3), 1, spec);
  EXPECT_LT(o.residual, 1e-10);
  EXPECT_LT((o.representative.packed() - apex.packed()).norm(), 1e-8);
}

TEST(PeriodicPoint, ContinuesToSmallMu) {
  const double m = 1e-3;
  const MassRatio mu(m);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const SectionSpec spec{AngleKind::kPhysical, 0.0};
  const RotState guess{mu.earth() + Vec3(0, 0, 0.5), Vec3::Zero()};
  const PeriodicOrbit o = find_periodic_point(flow, guess, 1, spec);
  EXPECT_LT(o.residual, 1e-10);
  const ReturnSample r = return_map(flow, o.representative, spec, 1);
  EXPECT_LT((r.fx.packed() - o.representative.packed()).norm(), 1e-9);
  EXPECT_LT((o.representative.q - guess.q).norm(), 0.05);
}

TEST(PeriodicPoint, NewtonFailsAfterMaxIter) {
  const MassRatio mu(0.0);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const SectionSpec spec{AngleKind::kPhysical, 0.0};
  NewtonOptions opt;
  opt.max_iter = 1;
  opt.tol = 1e-30;
  EXPECT_EQ(code_of([&] { find_periodic_point(flow, nudge(mu, vertical_apex(), spec, 1e-2), 1, spec, opt); }),
            ErrorCode::kNoConvergence);
}

TEST(EllipsoidPeriodicPoint, RationalRatioIsSingular) {
  EXPECT_EQ(code_of([] { find_ellipsoid_periodic_point(1.0, 2.0, {0.3, 0.1}, 0.0, 2); }),
            ErrorCode::kJacobianSingular);
}

TEST(EllipsoidPeriodicPoint, IrrationalRatioFindsTheCenter) {
  const EllipsoidPeriodicPoint p = find_ellipsoid_periodic_point(1.0, std::sqrt(2.0), {0.05, -0.02}, 0.0, 1);
  EXPECT_LT(p.residual, 1e-10);
  EXPECT_LT(std::abs(p.z1), 1e-8);
}

TEST(Continuation, MuFamilyReachesOnePercent) {
  const MassRatio mu(0.0);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const SectionSpec spec{AngleKind::kPhysical, 0.0};
  PeriodicOrbit seed = find_periodic_point(flow, vertical_apex(), 1, spec);
  seed.symmetry = OrbitSymmetry::kVerticalCollision;
  ContinuationOptions opt;
  opt.param = ContinuationParam::kMu;
  opt.step = 1e-3;
  opt.count = 10;
  const ContinuationResult r = continue_family(seed, IntegratorConfig{}, opt);
  ASSERT_TRUE(r.complete) << r.stop_reason;
  ASSERT_EQ(r.members.size(), 11u);
  for (size_t i = 1; i < r.members.size(); ++i) {
    const PeriodicOrbit& m = r.members[i];
    EXPECT_NEAR(m.mu, 1e-3 * i, 1e-15);
    EXPECT_LT(m.residual, 1e-10);
    EXPECT_LT((m.representative.packed() - r.members[i - 1].representative.packed()).norm(), 0.05);
    EXPECT_EQ(m.symmetry, OrbitSymmetry::kVerticalCollision);
  }
}

TEST(Continuation, OversizedStepStopsWithFold) {
  // At mu = 1/2 the L1 level drops to -2 = c and the Earth component opens.
  const MassRatio mu(0.0);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const SectionSpec spec{AngleKind::kPhysical, 0.0};
  const PeriodicOrbit seed = find_periodic_point(flow, vertical_apex(), 1, spec);
  ContinuationOptions opt;
  opt.step = 0.5;
  opt.count = 1;
  const ContinuationResult r = continue_family(seed, IntegratorConfig{}, opt);
  EXPECT_FALSE(r.complete);
  EXPECT_EQ(r.stop_code, ErrorCode::kFoldDetected);
  EXPECT_EQ(r.members.size(), 1u);
  EXPECT_FALSE(r.stop_reason.empty());
}

TEST(Continuation, RejectsZeroStep) {
  PeriodicOrbit seed;
  ContinuationOptions opt;
  opt.step = 0.0;
  EXPECT_EQ(code_of([&] { continue_family(seed, IntegratorConfig{}, opt); }), ErrorCode::kInvalidArgument);
}

TEST(Floquet, CircularKeplerMultipliersOnTheUnitCircle) {
  const MassRatio mu(0.0);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const double r = 0.5, w = std::pow(r, -1.5);
  PeriodicOrbit o;
  o.representative = {Vec3(r, 0, 0), Vec3(0, r * w, 0)};
  o.period = kTwoPi / (w - 1.0);
  o.energy = hamiltonian_rot(o.representative, mu);
  o.primary = Primary::kEarth;
  analyze_orbit(flow, o);
  ASSERT_LT(o.closure_error, 1e-9);
  const auto m = floquet_multipliers(flow, o);
  ASSERT_EQ(m.size(), 6u);
  for (const auto& l : m) EXPECT_NEAR(std::abs(l), 1.0, 1e-6);
  EXPECT_LT(o.floquet_reciprocal, 1e-6);
  EXPECT_GE(unit_multiplier_count(m), 2);
  EXPECT_GT(o.angular_momentum, 0.0);
}

TEST(Floquet, EarthMoonPlanarOrbit) {
  const MassRatio mu(kEarthMoonMu);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const double c = l1_energy(kEarthMoonMu) - 0.05;
  const double q1 = mu.moon().x() + 0.05;
  PeriodicOrbit o = find_symmetric_planar_orbit(flow, c, q1, q1 - 1.0, Primary::kMoon);
  const auto m = floquet_multipliers(flow, o);
  EXPECT_LT(o.floquet_reciprocal, 1e-6);
  EXPECT_GE(unit_multiplier_count(m, 1e-5), 2);
  EXPECT_FALSE(o.floquet_ill_conditioned);
}

TEST(SymmetricPlanar, RetrogradeAndDirectLunarOrbits) {
  const MassRatio mu(kEarthMoonMu);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const double c = l1_energy(kEarthMoonMu) - 0.05;
  const double q1 = mu.moon().x() + 0.05;
  // q2-dot = p2 - q1: negative on the Earth-facing side of the Moon means clockwise.
  const PeriodicOrbit retro = find_symmetric_planar_orbit(flow, c, q1, q1 - 1.0, Primary::kMoon);
  const PeriodicOrbit direct = find_symmetric_planar_orbit(flow, c, q1, q1 + 1.0, Primary::kMoon);
  for (const PeriodicOrbit* o : {&retro, &direct}) {
    EXPECT_LT(o->closure_error, 1e-8);
    EXPECT_EQ(o->symmetry, OrbitSymmetry::kSymmetricXAxis);
    EXPECT_NEAR(hamiltonian_rot(o->representative, mu), c, 1e-12);
    EXPECT_LT(o->max_vertical, 1e-12);
    EXPECT_GT(o->period, 0.0);
  }
  EXPECT_LT(retro.angular_momentum, 0.0);
  EXPECT_GT(direct.angular_momentum, 0.0);

  // mirror symmetry about the x-axis: R x(t) = x(T - t)
  for (const PeriodicOrbit* o : {&retro, &direct}) {
    const Trajectory a = flow.integrate(o->representative, o->period / 3);
    const Trajectory b = flow.integrate(o->representative, 2 * o->period / 3);
    const RotState xa = flow.to_rot(a.samples.back().chart, a.samples.back().state);
    const RotState xb = flow.to_rot(b.samples.back().chart, b.samples.back().state);
    const RotState rx{Vec3(xa.q.x(), -xa.q.y(), xa.q.z()), Vec3(-xa.p.x(), xa.p.y(), -xa.p.z())};
    EXPECT_LT((rx.packed() - xb.packed()).norm(), 1e-8);
  }
}

TEST(SymmetricPlanar, ShootingResidualVanishesAtTheOrbit) {
  const MassRatio mu(kEarthMoonMu);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const double c = l1_energy(kEarthMoonMu) - 0.05;
  const double q1 = mu.moon().x() + 0.05;
  const PeriodicOrbit o = find_symmetric_planar_orbit(flow, c, q1, q1 - 1.0, Primary::kMoon);
  double half = 0.0;
  EXPECT_LT(std::abs(perpendicular_crossing_residual(flow, c, o.representative.q.x(), -1.0, &half)), 1e-10);
  EXPECT_NEAR(2 * half, o.period, 1e-12);
}

TEST(SymmetricPlanar, StartOutsideHillRegionFails) {
  const MassRatio mu(kEarthMoonMu);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  EXPECT_EQ(code_of([&] { find_symmetric_planar_orbit(flow, l1_energy(kEarthMoonMu) - 0.05, -0.8, 0.0); }),
            ErrorCode::kOffSurface);
}

TEST(Symmetry, Names) {
  EXPECT_STREQ(symmetry_name(OrbitSymmetry::kSymmetricXAxis), "symmetric-x-axis");
  EXPECT_EQ(unit_multiplier_count({{1.0, 0.0}, {1.0 + 1e-9, 0.0}, {0.5, 0.0}}), 2);
}

TEST(SymmetricPlanar, KeplerRetrogradeCircle) {
  // mu = 0, c = -1.5: the retrograde circle has r = 1/4, inertial rate 8, rotating rate -9.
  const MassRatio mu(0.0);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const PeriodicOrbit o = find_symmetric_planar_orbit(flow, -1.5, 0.26, 0.26 - 2.0, Primary::kEarth);
  EXPECT_NEAR(o.representative.q.x(), 0.25, 1e-9);
  EXPECT_NEAR(o.period, kTwoPi / 9.0, 1e-9);
  EXPECT_LT(o.closure_error, 1e-9);
  EXPECT_LT(o.angular_momentum, 0.0);
}

TEST(Continuation, RetrogradeFamilyInEnergy) {
  const MassRatio mu(kEarthMoonMu);
  const Cr3bpFlow flow(mu, IntegratorConfig{});
  const double l1 = l1_energy(kEarthMoonMu);
  const double q1 = mu.moon().x() + 0.02;  // the lunar well is narrow at this energy
  const PeriodicOrbit seed = find_symmetric_planar_orbit(flow, l1 - 0.2, q1, q1 - 1.0, Primary::kMoon);
  ContinuationOptions opt;
  opt.param = ContinuationParam::kEnergy;
  opt.step = 0.02;
  opt.count = 9;
  const ContinuationResult r = continue_family(seed, IntegratorConfig{}, opt);
  ASSERT_TRUE(r.complete) << r.stop_reason;
  ASSERT_EQ(r.members.size(), 10u);
  EXPECT_NEAR(r.members.back().energy, l1 - 0.02, 1e-12);
  // period grows with energy along the retrograde branch
  for (size_t i = 1; i < r.members.size(); ++i) {
    EXPECT_LT(r.members[i].closure_error, 1e-8);
    EXPECT_LT(r.members[i].angular_momentum, 0.0);
    EXPECT_GT(r.members[i].period, r.members[i - 1].period);
  }
}
