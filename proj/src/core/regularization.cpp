#include "regularization.hpp"

#include "error.hpp"

#include <cmath>
#include <sstream>

namespace sectionscope {

ChartState stereo_to_chart(const MoserState& m) {
  const double k = 1.0 - m.xi[0];
  if (std::abs(k) < 1e-12) fail(ErrorCode::kCollision, "state on the collision fiber has no chart image");
  const Vec3 xv = m.xi.tail<3>();
  const Vec3 ev = m.eta.tail<3>();
  return {xv / k, m.eta[0] * xv + k * ev};
}

MoserState chart_to_stereo(const ChartState& cs) {
  const double n2 = cs.x.squaredNorm();
  const double xy = cs.x.dot(cs.y);
  MoserState m;
  m.xi[0] = (n2 - 1.0) / (n2 + 1.0);
  m.xi.tail<3>() = 2.0 * cs.x / (n2 + 1.0);
  m.eta[0] = xy;
  m.eta.tail<3>() = 0.5 * (n2 + 1.0) * cs.y - xy * cs.x;
  return m;
}

double chart_coupling(const MassRatio& mu, Primary primary) {
  return primary == Primary::kMoon ? mu.moon_mass() : mu.earth_mass();
}

namespace {

// Rotation by pi about the q3-axis; an involution.
Vec3 flip(const Vec3& v, Primary primary) {
  if (primary == Primary::kMoon) return v;
  return {-v.x(), -v.y(), v.z()};
}

}  // namespace

MoserState rot_to_moser(const RotState& s, const MassRatio& mu, Primary primary) {
  const double g = chart_coupling(mu, primary);
  const Vec3 center(-1.0 + g, 0.0, 0.0);
  return chart_to_stereo({-flip(s.p, primary), flip(s.q, primary) - center});
}

RotState moser_to_rot(const MoserState& m, const MassRatio& mu, Primary primary) {
  const double g = chart_coupling(mu, primary);
  const Vec3 center(-1.0 + g, 0.0, 0.0);
  const ChartState cs = stereo_to_chart(m);
  return {flip(cs.y + center, primary), flip(-cs.x, primary)};
}

namespace {

struct Terms {
  double g, k, D, P;
  Vec3 w;
};

Terms terms(const MoserState& m, const MassRatio& mu, Primary primary) {
  Terms t;
  t.g = chart_coupling(mu, primary);
  t.k = 1.0 - m.xi[0];
  t.w = m.eta.tail<3>() * t.k + m.xi.tail<3>() * m.eta[0];
  t.w.x() -= 1.0;
  t.D = t.w.norm();
  if (t.g < 1.0 && t.D < 1e-12) {
    std::ostringstream os;
    os << "collision with the other primary in the " << primary_name(primary) << " chart";
    fail(ErrorCode::kCollision, os.str());
  }
  t.P = m.xi[2] * m.eta[1] - m.xi[1] * m.eta[2];
  return t;
}

}  // namespace

FbM moser_fbM(const MoserState& m, double c, const MassRatio& mu, Primary primary) {
  const Terms t = terms(m, mu, primary);
  const double other = 1.0 - t.g;
  FbM r;
  r.b = -(c + 0.5) - (other > 0.0 ? other / t.D : 0.0);
  r.M = t.k * t.P - m.xi[2] * other;
  r.f = 1.0 + t.k * (-(c + 0.5) + t.P) - m.xi[2] * other - (other > 0.0 ? other * t.k / t.D : 0.0);
  return r;
}

double regularized_hamiltonian(const MoserState& m, double c, const MassRatio& mu, Primary primary) {
  const double f = moser_fbM(m, c, mu, primary).f;
  return 0.5 * f * f * m.eta.squaredNorm();
}

Vec8 regularized_gradient(const MoserState& m, double c, const MassRatio& mu, Primary primary) {
  const Terms t = terms(m, mu, primary);
  const double other = 1.0 - t.g;
  const double f = moser_fbM(m, c, mu, primary).f;

  // Polynomial part of f.
  Vec8 df = Vec8::Zero();
  df[0] = c + 0.5 - t.P;
  df[1] = -t.k * m.eta[2];
  df[2] = t.k * m.eta[1] - other;
  df[5] = t.k * m.xi[2];
  df[6] = -t.k * m.xi[1];

  // T = -other (1 - xi0) / D.
  if (other > 0.0) {
    const double D3 = t.D * t.D * t.D;
    const double a = other / t.D;
    const double b = other * t.k / D3;
    Eigen::Matrix<double, 3, 8> dw = Eigen::Matrix<double, 3, 8>::Zero();
    dw.col(0) = -m.eta.tail<3>();
    for (int i = 0; i < 3; ++i) {
      dw(i, 1 + i) = m.eta[0];
      dw(i, 5 + i) = t.k;
    }
    dw.col(4) = m.xi.tail<3>();
    df += b * (t.w.transpose() * dw).transpose();
    df[0] += a;
  }

  const double e2 = m.eta.squaredNorm();
  Vec8 grad = f * e2 * df;
  grad.tail<4>() += f * f * m.eta;
  return grad;
}

Vec8 project_to_cotangent_sphere(const MoserState& m, const Vec8& grad) {
  const Vec4 q_xi = grad.head<4>();
  const Vec4 q_eta = grad.tail<4>();
  const double bb = m.xi.dot(q_eta);
  const double aa = m.xi.dot(q_xi) - m.eta.dot(q_eta);
  Vec8 out;
  out.head<4>() = q_eta - bb * m.xi;
  out.tail<4>() = -q_xi + aa * m.xi + bb * m.eta;
  return out;
}

Vec8 regularized_vector_field(const MoserState& m, double c, const MassRatio& mu, Primary primary) {
  const double res = m.constraint_residual();
  if (!(res <= 1e-6)) {
    std::ostringstream os;
    os << "Moser state off T*S^3 by " << res;
    fail(ErrorCode::kConstraintDrift, os.str());
  }
  return project_to_cotangent_sphere(m, regularized_gradient(m, c, mu, primary));
}

Vec8 round_geodesic_field(const MoserState& m) {
  Vec8 grad;
  grad << Vec4::Zero(), m.eta;
  return project_to_cotangent_sphere(m, grad);
}

double physical_time_rate(const MoserState& m, double g) { return g * (1.0 - m.xi[0]) * m.eta.norm(); }

MoserState project_constraints(const MoserState& m) {
  MoserState out;
  out.xi = m.xi.normalized();
  out.eta = m.eta - out.xi.dot(m.eta) * out.xi;
  return out;
}

PlanarPair levi_civita(Complex u, Complex v) {
  if (v == Complex(0.0, 0.0)) fail(ErrorCode::kInvalidArgument, "Levi-Civita map undefined at v = 0");
  return {u / std::conj(v), 2.0 * v * v};
}

double levi_civita_hamiltonian(Complex u, Complex v) { return 0.5 * (std::norm(u) + std::norm(v) - 1.0); }

double levi_civita_kepler_residual(Complex u, Complex v) {
  const PlanarPair pq = levi_civita(u, v);
  const double r = std::abs(pq.q);
  const double h = 0.5 * std::norm(pq.p) - 1.0 / r;
  return (h + 0.5) * r - 2.0 * levi_civita_hamiltonian(u, v);
}

double kepler_k(const Eigen::Vector2d& q, const Eigen::Vector2d& p) {
  const double s = 0.5 * (p.squaredNorm() + 1.0) * q.norm();
  return 0.5 * s * s;
}

Vec4 kepler_k_gradient(const Eigen::Vector2d& q, const Eigen::Vector2d& p) {
  const double r = q.norm();
  if (r < kCollisionThreshold) fail(ErrorCode::kCollision, "intermediate Kepler Hamiltonian at the origin");
  const double w = 0.5 * (p.squaredNorm() + 1.0);
  const double s = w * r;
  Vec4 g;
  g.head<2>() = s * w * q / r;
  g.tail<2>() = s * r * p;
  return g;
}

}  // namespace sectionscope
