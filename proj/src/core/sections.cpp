#include "sections.hpp"

#include "error.hpp"
#include "regularization.hpp"

#include <cmath>
#include <sstream>

namespace sectionscope {

namespace {

double wrap_2pi(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

}  // namespace

double physical_angle(const RotState& s) {
  const double q3 = s.q.z(), p3 = s.p.z();
  if (q3 * q3 + p3 * p3 < 1e-24) fail(ErrorCode::kBinding, "physical angle undefined on the binding q3 = p3 = 0");
  return wrap_2pi(std::atan2(p3, q3));
}

Eigen::Vector2d physical_angle_pair(Chart chart, const VecX& y) {
  if (!is_moser(chart)) return {y[2], y[5]};
  // q3 = y3 (the chart translation and the Earth flip leave q3 alone),
  // p3 = -x3 = -xi3 / (1 - xi0).
  const double k = 1.0 - y[0];
  const double y3 = y[4] * y[3] + k * y[7];
  return {k * y3, -y[3]};
}

double physical_angle(Chart chart, const VecX& y) {
  const Eigen::Vector2d ab = physical_angle_pair(chart, y);
  if (ab.squaredNorm() < 1e-24) fail(ErrorCode::kBinding, "physical angle undefined at this chart point");
  return wrap_2pi(std::atan2(ab[1], ab[0]));
}

double transversality_value(const RotState& s, const MassRatio& mu) {
  const double q3 = s.q.z(), p3 = s.p.z();
  const double rho2 = q3 * q3 + p3 * p3;
  if (rho2 < 1e-24) fail(ErrorCode::kBinding, "transversality undefined on the binding q3 = p3 = 0");
  const double rm = (s.q - mu.moon()).norm();
  const double re = (s.q - mu.earth()).norm();
  double F = 0.0;
  if (mu.moon_mass() > 0.0) {
    if (rm < kCollisionThreshold) fail(ErrorCode::kCollision, "transversality at the Moon");
    F += mu.moon_mass() / (rm * rm * rm);
  }
  if (mu.earth_mass() > 0.0) {
    if (re < kCollisionThreshold) fail(ErrorCode::kCollision, "transversality at the Earth");
    F += mu.earth_mass() / (re * re * re);
  }
  return (p3 * p3 + q3 * q3 * F) / rho2;
}

double geodesic_angle(const MoserState& m, int last) {
  if (last < 1 || last > 3) fail(ErrorCode::kInvalidArgument, "geodesic angle index must be 1, 2 or 3");
  const double x = m.xi[last], e = m.eta[last];
  if (x * x + e * e < 1e-24) fail(ErrorCode::kBinding, "geodesic angle undefined on the binding");
  return wrap_2pi(std::atan2(x, e));
}

RotState involution(const RotState& s) {
  RotState r = s;
  r.q.z() = -r.q.z();
  r.p.z() = -r.p.z();
  return r;
}

MoserState involution(const MoserState& m) {
  MoserState r = m;
  r.xi[3] = -r.xi[3];
  r.eta[3] = -r.eta[3];
  return r;
}

std::complex<double> leaf_label(const MoserState& m) {
  const double s = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * m.eta.squaredNorm()));
  const double r = std::sqrt(s);
  return {r * m.xi[0], m.eta[0] / r};
}

std::complex<double> leaf_label(const RotState& s, const MassRatio& mu, Primary primary) {
  return leaf_label(rot_to_moser(s, mu, primary));
}

double ellipsoid_defect(double a, double b, const C2& z) {
  return kPi * std::norm(z[0]) / a + kPi * std::norm(z[1]) / b - 1.0;
}

C2 ellipsoid_flow(double a, double b, double t, const C2& z) {
  if (!(a > 0.0 && b > 0.0)) fail(ErrorCode::kInvalidArgument, "ellipsoid parameters must be positive");
  const double d = ellipsoid_defect(a, b, z);
  if (!(std::abs(d) <= 1e-10)) {
    std::ostringstream os;
    os << "point off the ellipsoid boundary by " << d;
    fail(ErrorCode::kOffSurface, os.str());
  }
  C2 out;
  out[0] = std::polar(1.0, kTwoPi * a * t) * z[0];
  out[1] = std::polar(1.0, kTwoPi * b * t) * z[1];
  return out;
}

C2 ellipsoid_page_point(double a, double b, std::complex<double> z1, double theta) {
  const double rest = b / kPi * (1.0 - kPi * std::norm(z1) / a);
  if (!(rest > 0.0)) fail(ErrorCode::kOffSurface, "disk coordinate outside the page");
  C2 z;
  z << z1, std::polar(std::sqrt(rest), theta);
  return z;
}

EllipsoidReturn ellipsoid_return(double a, double b, const C2& z, double theta) {
  if (std::abs(z[1]) < 1e-12) fail(ErrorCode::kBinding, "ellipsoid point on the binding z2 = 0");
  // Event: sin(arg z2 - theta) with cos > 0, i.e. Im(z2 e^{-i theta}) rising through 0.
  const std::complex<double> rot = std::polar(1.0, -theta);
  auto event = [&](double t) { return (ellipsoid_flow(a, b, t, z)[1] * rot).imag(); };
  auto on_page = [&](double t) { return (ellipsoid_flow(a, b, t, z)[1] * rot).real() > 0.0; };
  const double period = 1.0 / b;
  const int samples = 64;
  const double dt = period / samples;
  double t0 = 0.0, e0 = 0.0;
  for (int i = 1; i <= 2 * samples; ++i) {
    const double t1 = i * dt;
    const double e1 = event(t1);
    if (e0 < 0.0 && e1 >= 0.0) {
      double lo = t0, hi = t1;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (event(mid) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double tau = 0.5 * (lo + hi);
      if (on_page(tau)) {
        EllipsoidReturn r;
        r.z = z;
        r.tau = tau;
        r.fz = ellipsoid_flow(a, b, tau, z);
        r.fz[1] = std::polar(std::abs(r.fz[1]), theta);  // snap the residual phase error onto the page
        r.rotation = std::abs(z[0]) > 0.0 ? std::arg(r.fz[0] / z[0]) : 0.0;
        return r;
      }
    }
    t0 = t1;
    e0 = e1;
  }
  fail(ErrorCode::kNoCrossing, "no return to the ellipsoid page");
}

Vec3 hopf_map(const C2& z) {
  const double n = z.squaredNorm();
  if (n == 0.0) fail(ErrorCode::kInvalidArgument, "Hopf map undefined at the origin");
  const std::complex<double> w = 2.0 * z[0] * std::conj(z[1]);
  return Vec3(w.real(), w.imag(), std::norm(z[0]) - std::norm(z[1])) / n;
}

}  // namespace sectionscope
