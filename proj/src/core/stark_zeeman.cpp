#include "stark_zeeman.hpp"

#include "error.hpp"

#include <cmath>
#include <random>

namespace sectionscope {

double StarkZeemanSystem::hamiltonian(const Vec3& q, const Vec3& p) const {
  const double r = q.norm();
  if (r < kCollisionThreshold) fail(ErrorCode::kCollision, "Stark-Zeeman evaluation at the singularity");
  return 0.5 * (p + magnetic(q)).squaredNorm() - g / r + v1(q);
}

double StarkZeemanSystem::vertical_stiffness(const Vec3& q) const {
  const double r = q.norm();
  if (r < kCollisionThreshold) fail(ErrorCode::kCollision, "Stark-Zeeman evaluation at the singularity");
  double ratio;
  if (std::abs(q.z()) > 1e-6) {
    ratio = v1_gradient(q).z() / q.z();
  } else {
    const double h = 1e-5;
    const Vec3 up(q.x(), q.y(), h);
    const Vec3 down(q.x(), q.y(), -h);
    ratio = (v1_gradient(up).z() - v1_gradient(down).z()) / (2.0 * h);
  }
  return g / (r * r * r) + ratio;
}

double StarkZeemanSystem::transversality(const Vec3& q, const Vec3& p) const {
  const double rho2 = q.z() * q.z() + p.z() * p.z();
  if (rho2 < 1e-24) fail(ErrorCode::kBinding, "transversality undefined on the binding q3 = p3 = 0");
  return (p.z() * p.z() + q.z() * q.z() * vertical_stiffness(q)) / rho2;
}

StarkZeemanSystem cr3bp_stark_zeeman(const MassRatio& mu, double c, Primary primary) {
  // Work in the Moon chart of the (possibly relabeled) problem.
  const double m = primary == Primary::kMoon ? mu.value() : 1.0 - mu.value();
  const double shift = -1.0 + m;  // regularized primary's q1 in its own frame
  const double other = 1.0 - m;
  const Vec3 other_pos(1.0, 0.0, 0.0);

  StarkZeemanSystem sys;
  sys.name = std::string("cr3bp-") + primary_name(primary);
  sys.g = m;
  sys.c = c;
  sys.other_mass = other;
  sys.other_position = other_pos;
  sys.v1 = [=](const Vec3& q) {
    const double r = (q - other_pos).norm();
    const double x = q.x() + shift;
    return -other / r - 0.5 * (x * x + q.y() * q.y());
  };
  sys.v1_gradient = [=](const Vec3& q) {
    const Vec3 d = q - other_pos;
    const double r = d.norm();
    Vec3 grad = other * d / (r * r * r);
    grad.x() -= q.x() + shift;
    grad.y() -= q.y();
    return grad;
  };
  sys.magnetic = [=](const Vec3& q) { return Vec3(q.y(), -q.x() - shift, 0.0); };
  return sys;
}

AssumptionReport check_assumptions(const StarkZeemanSystem& sys, int samples, std::uint64_t seed, double radius) {
  AssumptionReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-radius, radius);
  std::uniform_real_distribution<double> lift(-radius, radius);
  rep.min_vertical_stiffness = std::numeric_limits<double>::infinity();

  auto flag = [&rep](const char* what, const Vec3& q, double value) {
    if (rep.failed.empty()) {
      rep.failed = what;
      rep.witness = q;
      rep.witness_value = value;
    }
  };

  int taken = 0;
  while (taken < samples) {
    const Vec3 q(uni(rng), uni(rng), uni(rng));
    if (q.norm() > radius || q.norm() < 1e-3) continue;
    const double v = sys.v1(q);
    if (!std::isfinite(v)) continue;
    if (sys.other_mass && (q - sys.other_position).norm() < 1e-3) continue;
    ++taken;

    const Vec3 a = sys.magnetic(q);
    const Vec3 a_lift = sys.magnetic(Vec3(q.x(), q.y(), lift(rng)));
    const double mag_err = std::max(std::abs(a.z()), (a.head<2>() - a_lift.head<2>()).norm());
    if (mag_err > 1e-12 * (1.0 + a.norm())) {
      rep.magnetic_ok = false;
      flag("A2", q, mag_err);
    }

    const double v_mirror = sys.v1(Vec3(q.x(), q.y(), -q.z()));
    const double sym_err = std::abs(v - v_mirror);
    if (sym_err > 1e-12 * (1.0 + std::abs(v))) {
      rep.symmetry_ok = false;
      flag("A2", q, sym_err);
    }

    const double f = sys.vertical_stiffness(q);
    rep.min_vertical_stiffness = std::min(rep.min_vertical_stiffness, f);
    if (!(f > 0.0)) {
      rep.positivity_ok = false;
      flag("A3", q, f);
    }

    if (sys.other_mass && std::abs(q.z()) > 1e-6) {
      rep.identity_checked = true;
      const double r = (q - sys.other_position).norm();
      const double expected = *sys.other_mass / (r * r * r);
      const double got = sys.v1_gradient(q).z() / q.z();
      const double err = std::abs(got - expected) / std::max(1.0, std::abs(expected));
      rep.identity_max_error = std::max(rep.identity_max_error, err);
      if (err > 1e-10) {
        rep.identity_ok = false;
        flag("identity", q, err);
      }
    }
  }
  rep.samples = taken;
  return rep;
}

}  // namespace sectionscope
