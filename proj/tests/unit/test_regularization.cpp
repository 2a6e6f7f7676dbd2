#include "dynamics.hpp"
#include "error.hpp"
#include "regularization.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sectionscope;

namespace {

MoserState random_moser(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  MoserState m;
  for (int i = 0; i < 4; ++i) m.xi[i] = n(rng);
  for (int i = 0; i < 4; ++i) m.eta[i] = n(rng);
  m.xi.normalize();
  m.eta -= m.xi.dot(m.eta) * m.xi;
  return m;
}

// State at energy c near `center`: U <= c, p = -A(q) + sqrt(2(c - U)) n.
RotState energy_state(std::mt19937_64& rng, const MassRatio& mu, double c, const Vec3& center, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const Vec3 q = center + Vec3(u(rng), u(rng), u(rng));
    if ((q - center).norm() > radius || (q - center).norm() < 1e-3 * radius) continue;
    const double U = effective_potential(q, mu);
    if (U > c) continue;
    const Vec3 dir = Vec3(n(rng), n(rng), n(rng)).normalized();
    return {q, Vec3(-q.y(), q.x(), 0.0) + std::sqrt(2.0 * (c - U)) * dir};
  }
}

}  // namespace

TEST(Stereo, SouthPoleExample) {
  const ChartState cs = stereo_to_chart({Vec4(-1, 0, 0, 0), Vec4(0, 1, 0, 0)});
  EXPECT_LT(cs.x.norm(), 1e-15);
  EXPECT_LT((cs.y - Vec3(2, 0, 0)).norm(), 1e-15);
}

TEST(Stereo, NorthPoleHasNoImage) {
  try {
    stereo_to_chart({Vec4(1, 0, 0, 0), Vec4(0, 1, 0, 0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCollision);
  }
}

TEST(Stereo, OriginMapsToSouthPole) {
  const Vec3 y(0.3, -1.2, 2.0);
  const MoserState m = chart_to_stereo({Vec3::Zero(), y});
  EXPECT_LT((m.xi - Vec4(-1, 0, 0, 0)).norm(), 1e-15);
  EXPECT_EQ(m.eta[0], 0.0);
  EXPECT_LT((m.eta.tail<3>() - y / 2).norm(), 1e-15);
}

TEST(Stereo, RoundTripsAndIdentities) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0 / std::sqrt(3.0), 10.0 / std::sqrt(3.0));
  for (int n = 0; n < 1000; ++n) {
    const ChartState cs{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))};
    const MoserState m = chart_to_stereo(cs);
    EXPECT_LT(m.constraint_residual(), 1e-12);
    const ChartState back = stereo_to_chart(m);
    EXPECT_LT((back.x - cs.x).norm(), 1e-12 * (1 + cs.x.norm()));
    EXPECT_LT((back.y - cs.y).norm(), 1e-12 * (1 + cs.y.norm()));
    EXPECT_NEAR(2.0 / (cs.x.squaredNorm() + 1.0), 1.0 - m.xi[0], 1e-14);
    EXPECT_NEAR(cs.y.norm(), (1.0 - m.xi[0]) * m.eta.norm(), 1e-12 * (1 + cs.y.norm()));

    MoserState s = random_moser(rng);
    if (s.xi[0] > 0.9) continue;
    const MoserState s2 = chart_to_stereo(stereo_to_chart(s));
    EXPECT_LT((s2.xi - s.xi).norm(), 1e-12);
    EXPECT_LT((s2.eta - s.eta).norm(), 1e-12 * (1 + s.eta.norm()));
  }
}

TEST(Stereo, KeplerCircleIsEquatorialGreatCircle) {
  // Inertial Kepler at energy -1/2: unit circle with unit speed.
  for (int k = 0; k < 64; ++k) {
    const double t = kTwoPi * k / 64;
    const Vec3 q(std::cos(t), std::sin(t), 0.0), p(-std::sin(t), std::cos(t), 0.0);
    const MoserState m = chart_to_stereo({-p, q});
    EXPECT_NEAR(m.xi[0], 0.0, 1e-15);
    EXPECT_NEAR(m.xi[3], 0.0, 1e-15);
    EXPECT_NEAR(0.5 * m.eta.squaredNorm(), 0.5, 1e-14);
  }
}

TEST(MoserTerms, MassOneDropsOtherPrimary) {
  std::mt19937_64 rng(2);
  const double c = -1.7;
  for (int n = 0; n < 100; ++n) {
    const MoserState m = random_moser(rng);
    const FbM r = moser_fbM(m, c, MassRatio(1.0));
    EXPECT_DOUBLE_EQ(r.b, -(c + 0.5));
    EXPECT_NEAR(r.M, (1 - m.xi[0]) * (m.xi[2] * m.eta[1] - m.xi[1] * m.eta[2]), 1e-15);
  }
}

TEST(MoserTerms, DecompositionConsistent) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 1000; ++n) {
    const MoserState m = random_moser(rng);
    const FbM r = moser_fbM(m, -1.6, MassRatio(kEarthMoonMu));
    EXPECT_NEAR(r.f - 1.0 - (1 - m.xi[0]) * r.b - r.M, 0.0, 1e-14 * (1 + std::abs(r.f)));
  }
}

TEST(MoserTerms, PullbackIsIntermediateHamiltonian) {
  // |eta| f - g == (H - c)|q - primary| in both charts.
  std::mt19937_64 rng(4);
  const MassRatio mu(kEarthMoonMu);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  const double c = -1.55;
  for (Primary pr : {Primary::kMoon, Primary::kEarth}) {
    const Vec3 center = pr == Primary::kMoon ? mu.moon() : mu.earth();
    for (int n = 0; n < 500; ++n) {
      const RotState s{Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))};
      if ((s.q - mu.moon()).norm() < 1e-2 || (s.q - mu.earth()).norm() < 1e-2) continue;
      const MoserState m = rot_to_moser(s, mu, pr);
      const double g = chart_coupling(mu, pr);
      const double k = (hamiltonian_rot(s, mu) - c) * (s.q - center).norm();
      EXPECT_NEAR(m.eta.norm() * moser_fbM(m, c, mu, pr).f - g, k, 1e-10 * (1 + std::abs(k)));
      const RotState back = moser_to_rot(m, mu, pr);
      EXPECT_LT((back.q - s.q).norm() + (back.p - s.p).norm(), 1e-12);
    }
  }
}

TEST(MoserTerms, ZeroMomentumGivesZeroQ) {
  MoserState m{Vec4(0.3, 0.4, 0.0, std::sqrt(1 - 0.25)), Vec4::Zero()};
  EXPECT_EQ(regularized_hamiltonian(m, -1.6, MassRatio(kEarthMoonMu)), 0.0);
}

TEST(MoserTerms, EnergyLevelMapsToQLevel) {
  std::mt19937_64 rng(5);
  const MassRatio mu(kEarthMoonMu);
  const double c = lagrange_points(mu).energies[0] - 0.1;
  for (int n = 0; n < 200; ++n) {
    const RotState s = energy_state(rng, mu, c, mu.moon(), 0.1);
    const MoserState m = rot_to_moser(s, mu, Primary::kMoon);
    EXPECT_NEAR(regularized_hamiltonian(m, c, mu), 0.5 * mu.value() * mu.value(), 1e-10);
    const RotState e = energy_state(rng, mu, c, mu.earth(), 0.5);
    const MoserState me = rot_to_moser(e, mu, Primary::kEarth);
    EXPECT_NEAR(regularized_hamiltonian(me, c, mu, Primary::kEarth), 0.5 * std::pow(1 - mu.value(), 2), 1e-10);
  }
}

TEST(MoserTerms, SmallMuLevelCorrespondence) {
  std::mt19937_64 rng(6);
  const MassRatio mu(1e-6);
  const double c = -1.8;
  for (int n = 0; n < 100; ++n) {
    const RotState s = energy_state(rng, mu, c, mu.moon(), 1e-6);
    const MoserState m = rot_to_moser(s, mu, Primary::kMoon);
    EXPECT_NEAR(regularized_hamiltonian(m, c, mu) / (0.5 * 1e-12), 1.0, 1e-8);
  }
}

TEST(MoserTerms, FiniteOnCollisionFiber) {
  const MoserState m{Vec4(1, 0, 0, 0), Vec4(0, 0.3, 0.4, 1.2)};
  const double q = regularized_hamiltonian(m, -1.6, MassRatio(kEarthMoonMu));
  EXPECT_TRUE(std::isfinite(q));
}

TEST(MoserTerms, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  const MassRatio mu(kEarthMoonMu);
  const double h = 1e-6;
  for (Primary pr : {Primary::kMoon, Primary::kEarth}) {
    double worst = 0.0;
    for (int n = 0; n < 300; ++n) {
      const MoserState m = random_moser(rng);
      const Vec8 grad = regularized_gradient(m, -1.6, mu, pr);
      Vec8 fd;
      for (int i = 0; i < 8; ++i) {
        Vec8 a = m.packed(), b = m.packed();
        a[i] += h;
        b[i] -= h;
        fd[i] = (regularized_hamiltonian(MoserState::unpack(a), -1.6, mu, pr) -
                 regularized_hamiltonian(MoserState::unpack(b), -1.6, mu, pr)) /
                (2 * h);
      }
      worst = std::max(worst, (grad - fd).norm() / grad.norm());
    }
    EXPECT_LT(worst, 1e-6);
  }
}

TEST(MoserField, RoundGeodesicGenerator) {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 100; ++n) {
    const MoserState m = random_moser(rng);
    const Vec8 f = round_geodesic_field(m);
    EXPECT_LT((f.head<4>() - m.eta).norm(), 1e-14 * (1 + m.eta.norm()));
    EXPECT_LT((f.tail<4>() + m.eta.squaredNorm() * m.xi).norm(), 1e-13 * (1 + m.eta.squaredNorm()));
  }
}

TEST(MoserField, TangentToConstraints) {
  std::mt19937_64 rng(9);
  const MassRatio mu(kEarthMoonMu);
  for (int n = 0; n < 100; ++n) {
    const MoserState m = random_moser(rng);
    const Vec8 f = regularized_vector_field(m, -1.6, mu);
    const double scale = 1 + f.norm();
    EXPECT_LT(std::abs(m.xi.dot(f.head<4>())), 1e-13 * scale);
    EXPECT_LT(std::abs(m.eta.dot(f.head<4>()) + m.xi.dot(f.tail<4>())), 1e-12 * scale * (1 + m.eta.norm()));
  }
}

TEST(MoserField, DriftedStateRejected) {
  MoserState m{Vec4(1.1, 0, 0, 0), Vec4(0, 1, 0, 0)};
  try {
    regularized_vector_field(m, -1.6, MassRatio(kEarthMoonMu));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConstraintDrift);
  }
}

TEST(LeviCivita, EvenCover) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Complex u(n(rng), n(rng)), v(n(rng), n(rng));
    const PlanarPair a = levi_civita(u, v), b = levi_civita(-u, -v);
    EXPECT_EQ(a.p, b.p);
    EXPECT_EQ(a.q, b.q);
    EXPECT_NEAR(levi_civita_kepler_residual(u, v), 0.0, 1e-12 * (1 + std::norm(u) + std::norm(v)));
  }
}

TEST(LeviCivita, UnitCircleHandValue) {
  const Complex v = std::polar(1.0, 0.7);
  const PlanarPair r = levi_civita(v, v);
  EXPECT_LT(std::abs(r.q - 2.0 * v * v), 1e-15);
  EXPECT_NEAR(std::abs(r.p), 1.0, 1e-15);
}

TEST(LeviCivita, ZeroLevelIsShiftedKeplerLevel) {
  // |u|^2 + |v|^2 = 1  =>  Kepler energy -1/2.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(0.0, kTwoPi), r(0.1, 0.9);
  for (int k = 0; k < 100; ++k) {
    const double s = r(rng);
    const Complex u = std::polar(std::sqrt(1 - s * s), a(rng)), v = std::polar(s, a(rng));
    const PlanarPair pq = levi_civita(u, v);
    EXPECT_NEAR(0.5 * std::norm(pq.p) - 1.0 / std::abs(pq.q), -0.5, 1e-12 / (s * s));
  }
}

TEST(LeviCivita, ZeroVRejected) { EXPECT_THROW(levi_civita(Complex(1, 0), Complex(0, 0)), Error); }

TEST(KeplerK, GradientMatchesFiniteDifferences) {
  const Eigen::Vector2d q(0.3, -0.7), p(1.1, 0.4);
  const Vec4 g = kepler_k_gradient(q, p);
  const double h = 1e-6;
  for (int i = 0; i < 4; ++i) {
    Vec4 a, b;
    a << q, p;
    b = a;
    a[i] += h;
    b[i] -= h;
    const double fd = (kepler_k(a.head<2>(), a.tail<2>()) - kepler_k(b.head<2>(), b.tail<2>())) / (2 * h);
    EXPECT_NEAR(g[i], fd, 1e-8);
  }
}
