#include "dynamics.hpp"

#include "error.hpp"

#include <cmath>
#include <sstream>

namespace sectionscope {

MassRatio::MassRatio(double mu) : mu_(mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) {
    std::ostringstream os;
    os << "mass ratio " << mu << " outside [0, 1]";
    fail(ErrorCode::kInvalidArgument, os.str());
  }
}

double MoserState::constraint_residual() const {
  return std::max(std::abs(xi.norm() - 1.0), std::abs(xi.dot(eta)));
}

const char* primary_name(Primary p) { return p == Primary::kEarth ? "earth" : "moon"; }

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kCollision: return "collision";
    case ErrorCode::kBinding: return "binding";
    case ErrorCode::kNoCrossing: return "no-crossing";
    case ErrorCode::kMaxTime: return "max-time";
    case ErrorCode::kStepUnderflow: return "step-underflow";
    case ErrorCode::kNoConvergence: return "no-convergence";
    case ErrorCode::kJacobianSingular: return "jacobian-singular";
    case ErrorCode::kFoldDetected: return "fold-detected";
    case ErrorCode::kAssumptionViolation: return "assumption-violation";
    case ErrorCode::kConstraintDrift: return "constraint-drift";
    case ErrorCode::kPerturbationEscape: return "perturbation-escape";
    case ErrorCode::kBracketFailure: return "bracket-failure";
    case ErrorCode::kOffSurface: return "off-surface";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

namespace {

struct PrimaryDistances {
  Vec3 dm;  // q - m
  Vec3 de;  // q - e
  double rm;
  double re;
};

PrimaryDistances distances(const Vec3& q, const MassRatio& mu) {
  PrimaryDistances d{q - mu.moon(), q - mu.earth(), 0.0, 0.0};
  d.rm = d.dm.norm();
  d.re = d.de.norm();
  // A massless primary is not a singularity.
  if ((mu.moon_mass() > 0.0 && d.rm < kCollisionThreshold) ||
      (mu.earth_mass() > 0.0 && d.re < kCollisionThreshold)) {
    std::ostringstream os;
    os << "collision input: q = (" << q.x() << ", " << q.y() << ", " << q.z() << ")";
    fail(ErrorCode::kCollision, os.str());
  }
  return d;
}

// Gravity part of dU/dq (everything except the centrifugal term).
Vec3 gravity_gradient(const PrimaryDistances& d, const MassRatio& mu) {
  Vec3 g = Vec3::Zero();
  if (mu.moon_mass() > 0.0) g += mu.moon_mass() * d.dm / (d.rm * d.rm * d.rm);
  if (mu.earth_mass() > 0.0) g += mu.earth_mass() * d.de / (d.re * d.re * d.re);
  return g;
}

double gravity_potential(const PrimaryDistances& d, const MassRatio& mu) {
  double v = 0.0;
  if (mu.moon_mass() > 0.0) v -= mu.moon_mass() / d.rm;
  if (mu.earth_mass() > 0.0) v -= mu.earth_mass() / d.re;
  return v;
}

}  // namespace

double hamiltonian_rot(const RotState& s, const MassRatio& mu) {
  const auto d = distances(s.q, mu);
  return 0.5 * s.p.squaredNorm() + gravity_potential(d, mu) + s.p.x() * s.q.y() - s.p.y() * s.q.x();
}

Vec6 hamiltonian_gradient(const RotState& s, const MassRatio& mu) {
  const auto d = distances(s.q, mu);
  Vec3 dq = gravity_gradient(d, mu);
  dq.x() -= s.p.y();
  dq.y() += s.p.x();
  Vec3 dp = s.p;
  dp.x() += s.q.y();
  dp.y() -= s.q.x();
  Vec6 g;
  g << dq, dp;
  return g;
}

Vec6 hamiltonian_vector_field(const RotState& s, const MassRatio& mu) {
  const Vec6 g = hamiltonian_gradient(s, mu);
  Vec6 f;
  f << g.segment<3>(3), -g.segment<3>(0);
  return f;
}

double effective_potential(const Vec3& q, const MassRatio& mu) {
  const auto d = distances(q, mu);
  return gravity_potential(d, mu) - 0.5 * (q.x() * q.x() + q.y() * q.y());
}

Vec3 effective_potential_gradient(const Vec3& q, const MassRatio& mu) {
  const auto d = distances(q, mu);
  return gravity_gradient(d, mu) - Vec3(q.x(), q.y(), 0.0);
}

Eigen::Matrix3d effective_potential_hessian(const Vec3& q, const MassRatio& mu) {
  const auto d = distances(q, mu);
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  auto add = [&h](double k, const Vec3& r, double n) {
    if (k == 0.0) return;
    const double n3 = n * n * n;
    h += k * (Eigen::Matrix3d::Identity() / n3 - 3.0 * r * r.transpose() / (n3 * n * n));
  };
  add(mu.moon_mass(), d.dm, d.rm);
  add(mu.earth_mass(), d.de, d.re);
  h(0, 0) -= 1.0;
  h(1, 1) -= 1.0;
  return h;
}

Vec3 rest_momentum(const Vec3& q) { return {-q.y(), q.x(), 0.0}; }

std::pair<Primary, double> nearest_primary(const Vec3& q, const MassRatio& mu) {
  const double re = (q - mu.earth()).norm();
  const double rm = (q - mu.moon()).norm();
  if (mu.moon_mass() == 0.0) return {Primary::kEarth, re};
  if (mu.earth_mass() == 0.0) return {Primary::kMoon, rm};
  return re <= rm ? std::pair{Primary::kEarth, re} : std::pair{Primary::kMoon, rm};
}

namespace {

double axis_slope(const MassRatio& mu, double x) {
  const double m1 = mu.moon().x();
  const double e1 = mu.earth().x();
  const double am = std::abs(x - m1);
  const double ae = std::abs(x - e1);
  return mu.moon_mass() * (x - m1) / (am * am * am) + mu.earth_mass() * (x - e1) / (ae * ae * ae) - x;
}

double axis_slope_derivative(const MassRatio& mu, double x) {
  const double am = std::abs(x - mu.moon().x());
  const double ae = std::abs(x - mu.earth().x());
  return -2.0 * mu.moon_mass() / (am * am * am) - 2.0 * mu.earth_mass() / (ae * ae * ae) - 1.0;
}

double collinear_root(const MassRatio& mu, double lo, double hi) {
  double x = collinear_root_bisection(mu, lo, hi, 1e-13);
  for (int i = 0; i < 4; ++i) {
    const double step = axis_slope(mu, x) / axis_slope_derivative(mu, x);
    const double next = x - step;
    if (!(next > lo && next < hi)) break;
    x = next;
    if (std::abs(step) < 1e-16) break;
  }
  return x;
}

}  // namespace

double collinear_root_bisection(const MassRatio& mu, double lo, double hi, double tol) {
  // Step off the singular endpoints; the slope diverges there.
  const double inset = 1e-12;
  double a = lo + inset;
  double b = hi - inset;
  double fa = axis_slope(mu, a);
  double fb = axis_slope(mu, b);
  if (!(fa > 0.0 && fb < 0.0)) {
    std::ostringstream os;
    os << "cannot bracket collinear equilibrium in (" << lo << ", " << hi << ") for mu = " << mu.value();
    fail(ErrorCode::kBracketFailure, os.str());
  }
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = axis_slope(mu, mid);
    if (fm > 0.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

bool LagrangePointSet::ordering_ok(double eq_tol) const {
  return energies[0] < energies[1] && energies[1] < energies[2] && energies[2] < energies[3] &&
         std::abs(energies[3] - energies[4]) < eq_tol;
}

RotState LagrangePointSet::state(int index) const {
  const Vec3& q = points.at(static_cast<std::size_t>(index));
  return {q, rest_momentum(q)};
}

LagrangePointSet lagrange_points(const MassRatio& mu) {
  if (!(mu.value() > 0.0 && mu.value() < 1.0)) {
    std::ostringstream os;
    os << "lagrange points require 0 < mu < 1, got " << mu.value();
    fail(ErrorCode::kInvalidArgument, os.str());
  }
  const double m1 = mu.moon().x();
  const double e1 = mu.earth().x();
  constexpr double kFar = 3.0;

  LagrangePointSet set;
  set.points[0] = Vec3(collinear_root(mu, m1, e1), 0.0, 0.0);
  set.points[1] = Vec3(collinear_root(mu, -kFar, m1), 0.0, 0.0);
  set.points[2] = Vec3(collinear_root(mu, e1, kFar), 0.0, 0.0);

  for (int k = 0; k < 2; ++k) {
    const double sign = k == 0 ? 1.0 : -1.0;
    Eigen::Vector2d x(mu.value() - 0.5, sign * std::sqrt(3.0) / 2.0);
    for (int it = 0; it < 20; ++it) {
      const Vec3 q(x.x(), x.y(), 0.0);
      const Vec3 g = effective_potential_gradient(q, mu);
      if (g.head<2>().norm() < 1e-15) break;
      const Eigen::Matrix2d h = effective_potential_hessian(q, mu).topLeftCorner<2, 2>();
      x -= h.fullPivLu().solve(g.head<2>());
    }
    set.points[3 + k] = Vec3(x.x(), x.y(), 0.0);
  }

  for (int i = 0; i < 5; ++i) {
    set.energies[i] = effective_potential(set.points[i], mu);
    set.gradient_norms[i] = effective_potential_gradient(set.points[i], mu).norm();
  }
  return set;
}

bool hill_membership(const Vec3& q, double c, const MassRatio& mu) {
  return effective_potential(q, mu) <= c;
}

}  // namespace sectionscope
