#include "return_map.hpp"

#include "dynamics.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "regularization.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace sectionscope {

const char* angle_kind_name(AngleKind k) {
  switch (k) {
    case AngleKind::kPhysical: return "physical";
    case AngleKind::kGeodesic: return "geodesic";
    case AngleKind::kEllipsoid: return "ellipsoid";
  }
  return "unknown";
}

double angle_offset(double angle, double page) {
  double d = std::remainder(angle - page, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

EventSpec page_event(const SectionSpec& spec, int occurrence) {
  const double s = std::sin(spec.page), c = std::cos(spec.page);
  EventSpec ev;
  // -sin(theta - page), from the (q3, p3) direction without calling atan2.
  ev.fn = [s, c](Chart chart, const VecX& y) {
    const Eigen::Vector2d ab = physical_angle_pair(chart, y);
    const double r = ab.norm();
    if (r == 0.0) return 0.0;
    return (ab[0] * s - ab[1] * c) / r;
  };
  ev.accept = [s, c](Chart chart, const VecX& y) {
    const Eigen::Vector2d ab = physical_angle_pair(chart, y);
    return ab[0] * c + ab[1] * s > 0.0;
  };
  ev.direction = 1;
  ev.occurrence = occurrence;
  return ev;
}

namespace {

double binding_distance2(Chart chart, const VecX& y) {
  if (!is_moser(chart)) return y[2] * y[2] + y[5] * y[5];
  const double k = 1.0 - y[0];
  if (k < 1e-9) return std::numeric_limits<double>::infinity();  // p3 blows up at collision
  const double y3 = y[4] * y[3] + k * y[7];
  const double p3 = -y[3] / k;
  return y3 * y3 + p3 * p3;
}

void check_page_start(const RotState& x, const SectionSpec& spec) {
  if (spec.kind != AngleKind::kPhysical) {
    fail(ErrorCode::kInvalidArgument,
         std::string("return maps of the CR3BP flow use the physical page, not ") + angle_kind_name(spec.kind));
  }
  const double rho2 = x.q.z() * x.q.z() + x.p.z() * x.p.z();
  if (rho2 < 1e-12) fail(ErrorCode::kBinding, "start within 1e-12 of the binding");
  const double off = angle_offset(physical_angle(x), spec.page);
  if (std::abs(off) > 1e-10) {
    std::ostringstream os;
    os << "start is off the page by " << off << " rad";
    fail(ErrorCode::kInvalidArgument, os.str());
  }
}

}  // namespace

ReturnSample return_map(const Cr3bpFlow& flow, const RotState& x, const SectionSpec& spec, int iterates) {
  if (iterates < 1) fail(ErrorCode::kInvalidArgument, "iterates must be >= 1");
  check_page_start(x, spec);
  const double c = hamiltonian_rot(x, flow.mu());

  ReturnSample out;
  out.x = x;
  out.min_binding = x.q.z() * x.q.z() + x.p.z() * x.p.z();
  PropagateOptions opt;
  opt.event = page_event(spec, iterates);
  opt.record_samples = false;
  opt.observer = [&out](Chart chart, const VecX& y) {
    out.min_binding = std::min(out.min_binding, binding_distance2(chart, y));
  };
  PropagateResult r = flow.propagate({Chart::kRotating, x.packed(), 0.0}, c, opt);
  if (!r.event_found) fail(ErrorCode::kInternal, "propagation ended without the page event");
  out.end = r.end;
  out.fx = flow.to_rot(r.end.chart, r.end.y);
  out.tau = r.end.t;
  out.crossings = std::max(0, r.event_roots - 1);
  out.energy_error = std::abs(hamiltonian_rot(out.fx, flow.mu()) - c);
  out.min_binding = std::min(out.min_binding, binding_distance2(r.end.chart, r.end.y));
  out.binding_warning = out.min_binding < 1e-8;
  out.log = std::move(r.log);
  return out;
}

double omega(const Vec6& u, const Vec6& v) { return u.tail<3>().dot(v.head<3>()) - u.head<3>().dot(v.tail<3>()); }

Eigen::Vector4d DarbouxFrame::coords(const Vec6& u) const {
  Eigen::Vector4d out;
  for (int j = 0; j < 2; ++j) {
    out[j] = omega(u, basis.col(2 + j));
    out[2 + j] = -omega(u, basis.col(j));
  }
  return out;
}

namespace {

// Row r with r . v = omega(v, u).
Eigen::Matrix<double, 1, 6> omega_row(const Vec6& u) {
  Eigen::Matrix<double, 1, 6> r;
  r << -u.tail<3>().transpose(), u.head<3>().transpose();
  return r;
}

}  // namespace

DarbouxFrame darboux_frame(const RotState& x, const MassRatio& mu) {
  DarbouxFrame fr;
  fr.xh = hamiltonian_vector_field(x, mu);
  fr.grad = hamiltonian_gradient(x, mu);
  Eigen::Matrix<double, 2, 6> C;
  C << omega_row(fr.xh), omega_row(fr.grad);
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 6>> svd(C, Eigen::ComputeFullV);
  if (svd.singularValues()[1] < 1e-12 * std::max(1.0, svd.singularValues()[0])) {
    fail(ErrorCode::kJacobianSingular, "X_H and grad H are degenerate here (equilibrium?)");
  }
  std::vector<Vec6> v;
  for (int k = 2; k < 6; ++k) v.push_back(svd.matrixV().col(k));

  // Symplectic Gram-Schmidt.
  auto pick = [&](const Vec6& e, const std::vector<Vec6>& rest, int& best) {
    best = -1;
    double w = 0.0;
    for (int k = 0; k < static_cast<int>(rest.size()); ++k) {
      const double o = std::abs(omega(e, rest[k]));
      if (o > w) {
        w = o;
        best = k;
      }
    }
    if (best < 0 || w < 1e-10) fail(ErrorCode::kInternal, "complement of span{X_H, grad H} is not symplectic");
  };
  const Vec6 e1 = v[0];
  std::vector<Vec6> rest(v.begin() + 1, v.end());
  int k1 = 0;
  pick(e1, rest, k1);
  const Vec6 f1 = rest[k1] / omega(e1, rest[k1]);
  rest.erase(rest.begin() + k1);
  for (Vec6& r : rest) r = r - omega(r, f1) * e1 + omega(r, e1) * f1;
  const Vec6 e2 = rest[0] / rest[0].norm();
  std::vector<Vec6> last{rest[1]};
  int k2 = 0;
  pick(e2, last, k2);
  const Vec6 f2 = last[0] / omega(e2, last[0]);
  fr.basis << e1, e2, f1, f2;
  return fr;
}

Eigen::Matrix4d omega_matrix4() {
  Eigen::Matrix4d O = Eigen::Matrix4d::Zero();
  O.topRightCorner<2, 2>().setIdentity();
  O.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  return O;
}

double reciprocal_pair_residual(const std::vector<std::complex<double>>& ev) {
  double worst = 0.0;
  for (size_t i = 0; i < ev.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < ev.size(); ++j) {
      if (i != j) best = std::min(best, std::abs(ev[i] * ev[j] - 1.0));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

MatX replay_derivative(const Cr3bpFlow& flow, const RotState& x, double c, const StepLog& log, const MatX& dirs,
                       double h) {
  const MassRatio& mu = flow.mu();
  const Vec6 g0 = hamiltonian_gradient(x, mu);
  auto shoot = [&](const Vec6& y0) {
    // Back onto H = c along grad H(x).
    Vec6 y = y0;
    double shift = 0.0;
    for (int it = 0; it < 20; ++it) {
      const RotState s = RotState::unpack(y);
      const double e = hamiltonian_rot(s, mu) - c;
      if (std::abs(e) <= 4e-16 * std::max(1.0, std::abs(c))) break;
      const double a = -e / hamiltonian_gradient(s, mu).dot(g0);
      y += a * g0;
      shift += a;
    }
    if (std::abs(shift) * g0.norm() > 1e-6) {
      std::ostringstream os;
      os << "perturbed start needs an energy correction of " << std::abs(shift) * g0.norm();
      fail(ErrorCode::kPerturbationEscape, os.str());
    }
    const FlowPoint end = flow.replay({Chart::kRotating, y, 0.0}, c, log);
    return Vec6(flow.to_rot(end.chart, end.y).packed());
  };
  MatX out(6, dirs.cols());
  const Vec6 x0 = x.packed();
  for (Eigen::Index k = 0; k < dirs.cols(); ++k) {
    const Vec6 d = dirs.col(k);
    out.col(k) = (shoot(x0 + h * d) - shoot(x0 - h * d)) / (2.0 * h);
  }
  return out;
}

PageJacobian return_map_jacobian(const Cr3bpFlow& flow, const RotState& x, const SectionSpec& spec, double h,
                                 int iterates) {
  if (!(h > 0.0)) fail(ErrorCode::kInvalidArgument, "FD step must be positive");
  PageJacobian pj;
  pj.sample = return_map(flow, x, spec, iterates);
  const double c = hamiltonian_rot(x, flow.mu());
  const DarbouxFrame fx = darboux_frame(x, flow.mu());
  const DarbouxFrame ff = darboux_frame(pj.sample.fx, flow.mu());
  const MatX M = replay_derivative(flow, x, c, pj.sample.log, fx.basis, h);
  for (int i = 0; i < 4; ++i) pj.J.col(i) = ff.coords(M.col(i));
  const Eigen::Matrix4d O = omega_matrix4();
  pj.symplecticity = (pj.J.transpose() * O * pj.J - O).norm();
  Eigen::EigenSolver<Eigen::Matrix4d> es(pj.J, false);
  for (int i = 0; i < 4; ++i) pj.eigenvalues.push_back(es.eigenvalues()[i]);
  pj.reciprocal_residual = reciprocal_pair_residual(pj.eigenvalues);
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(pj.J);
  pj.condition = svd.singularValues()[0] / svd.singularValues()[3];
  return pj;
}

PageChart::PageChart(const MassRatio& mu, const RotState& base, double c, const SectionSpec& spec)
    : mu_(mu), base_(base), c_(c) {
  if (spec.kind != AngleKind::kPhysical) fail(ErrorCode::kInvalidArgument, "page charts exist for the physical page");
  ell_.setZero();
  ell_[2] = -std::sin(spec.page);
  ell_[5] = std::cos(spec.page);
  const Vec6 g = hamiltonian_gradient(base, mu);
  Eigen::Matrix<double, 2, 6> C;
  C << ell_.transpose(), g.transpose();
  Eigen::JacobiSVD<Eigen::Matrix<double, 2, 6>> svd(C, Eigen::ComputeFullV);
  if (svd.singularValues()[1] < 1e-12) fail(ErrorCode::kJacobianSingular, "grad H is normal to the page here");
  B_ = svd.matrixV().rightCols<4>();
  d_ = g - ell_.dot(g) * ell_;
}

RotState PageChart::point(const Eigen::Vector4d& s) const {
  const Vec6 y0 = base_.packed() + B_ * s;
  double alpha = 0.0;
  for (int it = 0; it < 50; ++it) {
    const RotState y = RotState::unpack(y0 + alpha * d_);
    const double e = hamiltonian_rot(y, mu_) - c_;
    if (std::abs(e) <= 4e-16 * std::max(1.0, std::abs(c_))) return y;
    const double step = -e / hamiltonian_gradient(y, mu_).dot(d_);
    alpha += step;
    if (std::abs(step) < 1e-17 * std::max(1.0, std::abs(alpha))) return RotState::unpack(y0 + alpha * d_);
    if (!std::isfinite(alpha) || std::abs(alpha) * d_.norm() > 0.5) break;
  }
  fail(ErrorCode::kPerturbationEscape, "page chart could not restore the energy");
}

Eigen::Vector4d PageChart::coords(const RotState& y) const { return B_.transpose() * (y.packed() - base_.packed()); }

Eigen::Matrix<double, 6, 4> PageChart::tangent(const Eigen::Vector4d& s) const {
  const RotState x = point(s);
  const Vec6 g = hamiltonian_gradient(x, mu_);
  const Eigen::RowVector4d da = -(g.transpose() * B_) / g.dot(d_);
  return B_ + d_ * da;
}

Vec6 PageChart::to_page(const RotState& at, const Vec6& v) const {
  const Vec6 xh = hamiltonian_vector_field(at, mu_);
  const double rate = ell_.dot(xh);
  if (std::abs(rate) < 1e-14) fail(ErrorCode::kBinding, "flow tangent to the page");
  return v - (ell_.dot(v) / rate) * xh;
}

namespace {

// Spectral derivative d/ds of a periodic sequence sampled on [0, 2 pi).
std::vector<double> fourier_derivative(const std::vector<double>& f) {
  const int n = static_cast<int>(f.size());
  std::vector<std::complex<double>> F(n);
  for (int k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < n; ++j) acc += f[j] * std::polar(1.0, -kTwoPi * j * k / n);
    F[k] = acc;
  }
  for (int k = 0; k < n; ++k) {
    int m = k <= n / 2 ? k : k - n;
    if (n % 2 == 0 && k == n / 2) m = 0;
    F[k] *= std::complex<double>(0.0, m);
  }
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) {
    std::complex<double> acc = 0.0;
    for (int k = 0; k < n; ++k) acc += F[k] * std::polar(1.0, kTwoPi * j * k / n);
    out[j] = acc.real() / n;
  }
  return out;
}

}  // namespace

double loop_action(const std::vector<Vec3>& q, const std::vector<Vec3>& p) {
  const int n = static_cast<int>(q.size());
  if (n < 4 || p.size() != q.size()) fail(ErrorCode::kInvalidArgument, "loop needs at least 4 samples");
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> qc(n);
    for (int j = 0; j < n; ++j) qc[j] = q[j][c];
    const std::vector<double> dq = fourier_derivative(qc);
    for (int j = 0; j < n; ++j) total += p[j][c] * dq[j];
  }
  return total * kTwoPi / n;
}

LoopCheck exactness_loop_check(const Cr3bpFlow& flow, const std::vector<RotState>& loop, const SectionSpec& spec) {
  const int n = static_cast<int>(loop.size());
  if (n < 4) fail(ErrorCode::kInvalidArgument, "loop needs at least 4 samples");
  std::vector<RotState> image(n);
  parallel_for(n, [&](std::size_t j) { image[j] = return_map(flow, loop[j], spec).fx; });
  LoopCheck out;
  out.points = n;
  std::vector<Vec3> q(n), p(n), fq(n), fp(n);
  for (int j = 0; j < n; ++j) {
    q[j] = loop[j].q;
    p[j] = loop[j].p;
    fq[j] = image[j].q;
    fp[j] = image[j].p;
    out.loop_length += (loop[(j + 1) % n].packed() - loop[j].packed()).norm();
  }
  out.action = loop_action(q, p);
  out.image_action = loop_action(fq, fp);
  out.residual = std::abs(out.image_action - out.action);
  return out;
}

std::vector<RotState> page_circle(const MassRatio& mu, const RotState& center, double c, const SectionSpec& spec,
                                  double r, int n) {
  const PageChart chart(mu, center, c, spec);
  std::vector<RotState> out;
  for (int j = 0; j < n; ++j) {
    const double a = kTwoPi * j / n;
    out.push_back(chart.point(Eigen::Vector4d(r * std::cos(a), r * std::sin(a), 0.0, 0.0)));
  }
  return out;
}

std::complex<double> ellipsoid_page_map(double a, double b, std::complex<double> z1, double theta, int k) {
  C2 z = ellipsoid_page_point(a, b, z1, theta);
  for (int i = 0; i < k; ++i) z = ellipsoid_return(a, b, z, theta).fz;
  return z[0];
}

EllipsoidJacobian ellipsoid_return_jacobian(double a, double b, std::complex<double> z1, double theta, double h) {
  EllipsoidJacobian out;
  const std::complex<double> dirs[2] = {{h, 0.0}, {0.0, h}};
  for (int k = 0; k < 2; ++k) {
    const std::complex<double> d =
        (ellipsoid_page_map(a, b, z1 + dirs[k], theta) - ellipsoid_page_map(a, b, z1 - dirs[k], theta)) / (2.0 * h);
    out.J(0, k) = d.real();
    out.J(1, k) = d.imag();
  }
  Eigen::Matrix2d O;
  O << 0, 1, -1, 0;
  out.symplecticity = (out.J.transpose() * O * out.J - O).norm();
  return out;
}

LoopCheck ellipsoid_loop_check(double a, double b, std::complex<double> center, double r, double theta, int n) {
  LoopCheck out;
  out.points = n;
  std::vector<double> x(n), y(n), fx(n), fy(n);
  for (int j = 0; j < n; ++j) {
    const std::complex<double> z = center + std::polar(r, kTwoPi * j / n);
    const std::complex<double> w = ellipsoid_page_map(a, b, z, theta);
    x[j] = z.real();
    y[j] = z.imag();
    fx[j] = w.real();
    fy[j] = w.imag();
    out.loop_length += std::abs(std::polar(r, kTwoPi * (j + 1) / n) - std::polar(r, kTwoPi * j / n));
  }
  auto action = [n](const std::vector<double>& u, const std::vector<double>& v) {
    const std::vector<double> du = fourier_derivative(u), dv = fourier_derivative(v);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += 0.5 * (u[j] * dv[j] - v[j] * du[j]);
    return s * kTwoPi / n;
  };
  out.action = action(x, y);
  out.image_action = action(fx, fy);
  out.residual = std::abs(out.image_action - out.action);
  return out;
}

double component_radius(const MassRatio& mu, double c, Primary primary) {
  const double m = mu.value();
  if (m > 0.0 && m < 1.0) {
    const LagrangePointSet lp = lagrange_points(mu);
    const Vec3 at = primary == Primary::kMoon ? mu.moon() : mu.earth();
    return (lp.points[0] - at).norm();
  }
  if (!(c < 0.0)) fail(ErrorCode::kInvalidArgument, "bounded Kepler component needs c < 0");
  return 1.0 / std::abs(c);
}

namespace {

Vec3 primary_position(const MassRatio& mu, Primary p) { return p == Primary::kMoon ? mu.moon() : mu.earth(); }

bool linked_to_primary(const Vec3& q, const Vec3& at, double c, const MassRatio& mu) {
  const int n = 32;
  for (int k = 1; k <= n; ++k) {
    const Vec3 s = at + (static_cast<double>(k) / n) * (q - at);
    if (effective_potential(s, mu) > c) return false;
  }
  return true;
}

void check_sampler(const MassRatio& mu, Primary primary) {
  const double mass = primary == Primary::kMoon ? mu.moon_mass() : mu.earth_mass();
  if (!(mass > 0.0)) fail(ErrorCode::kInvalidArgument, "sampling around a massless primary");
}

}  // namespace

std::vector<RotState> sample_shell(const MassRatio& mu, double c, int n, const ShellSamplerOptions& opt) {
  check_sampler(mu, opt.primary);
  const double R = opt.max_radius > 0.0 ? opt.max_radius : component_radius(mu, c, opt.primary);
  const Vec3 at = primary_position(mu, opt.primary);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  std::vector<RotState> out;
  long attempts = 0;
  while (static_cast<int>(out.size()) < n) {
    if (++attempts > 2000L * std::max(n, 1) + 100000) fail(ErrorCode::kInvalidArgument, "no admissible shell samples");
    Vec3 dir(gauss(rng), gauss(rng), gauss(rng));
    dir.normalize();
    const double r = R * std::cbrt(unit(rng));
    Vec3 vdir(gauss(rng), gauss(rng), gauss(rng));
    vdir.normalize();
    if (r < opt.min_radius) continue;
    const Vec3 q = at + r * dir;
    const double U = effective_potential(q, mu);
    if (!(U < c) || !linked_to_primary(q, at, c, mu)) continue;
    const Vec3 v = std::sqrt(2.0 * (c - U)) * vdir;
    out.push_back({q, v + Vec3(-q.y(), q.x(), 0.0)});
  }
  return out;
}

std::vector<RotState> sample_page(const MassRatio& mu, double c, const SectionSpec& spec, int n,
                                  const ShellSamplerOptions& opt, double min_rho) {
  if (spec.kind != AngleKind::kPhysical) fail(ErrorCode::kInvalidArgument, "page sampling needs the physical page");
  check_sampler(mu, opt.primary);
  const double R = opt.max_radius > 0.0 ? opt.max_radius : component_radius(mu, c, opt.primary);
  if (!(min_rho < R)) fail(ErrorCode::kInvalidArgument, "min_rho exceeds the sampling radius");
  const Vec3 at = primary_position(mu, opt.primary);
  const double cs = std::cos(spec.page), sn = std::sin(spec.page);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit;
  std::vector<RotState> out;
  long attempts = 0;
  while (static_cast<int>(out.size()) < n) {
    if (++attempts > 2000L * std::max(n, 1) + 100000) fail(ErrorCode::kInvalidArgument, "no admissible page samples");
    const double rho = min_rho + (R - min_rho) * unit(rng);
    const double pr = R * std::sqrt(unit(rng)), pa = kTwoPi * unit(rng);
    const double phi = kTwoPi * unit(rng);
    const Vec3 q(at.x() + pr * std::cos(pa), at.y() + pr * std::sin(pa), rho * cs);
    const double p3 = rho * sn;
    const double dist = (q - at).norm();
    if (dist < opt.min_radius || dist > R) continue;
    const double U = effective_potential(q, mu);
    const double planar = 2.0 * (c - U) - p3 * p3;
    if (!(planar > 0.0) || !linked_to_primary(q, at, c, mu)) continue;
    const double v = std::sqrt(planar);
    out.push_back({q, Vec3(v * std::cos(phi) - q.y(), v * std::sin(phi) + q.x(), p3)});
  }
  return out;
}

std::vector<ScanRow> section_scan_points(const Cr3bpFlow& flow, const std::vector<RotState>& pts,
                                         const ScanOptions& opt) {
  std::vector<ScanRow> rows(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    ScanRow& row = rows[i];
    row.index = static_cast<int>(i);
    row.x = pts[i];
    try {
      row.energy = hamiltonian_rot(pts[i], flow.mu());
      ReturnSample s;
      if (opt.jacobians) {
        PageJacobian pj = return_map_jacobian(flow, pts[i], opt.section, opt.h);
        row.symplecticity = pj.symplecticity;
        s = std::move(pj.sample);
      } else {
        s = return_map(flow, pts[i], opt.section);
      }
      row.fx = s.fx;
      row.tau = s.tau;
      row.energy_error = s.energy_error;
      row.min_binding = s.min_binding;
      row.binding_warning = s.binding_warning;
      const Primary pr = opt.sampler.primary;
      row.leaf_delta = std::abs(leaf_label(s.fx, flow.mu(), pr) - leaf_label(s.x, flow.mu(), pr));
    } catch (const Error& e) {
      row.error = error_code_name(e.code());
    }
  });
  return rows;
}

std::vector<ScanRow> section_scan(const Cr3bpFlow& flow, double c, const ScanOptions& opt) {
  ShellSamplerOptions so = opt.sampler;
  so.seed = opt.seed;
  return section_scan_points(flow, sample_page(flow.mu(), c, opt.section, opt.n, so), opt);
}

std::vector<BindingApproachRow> binding_approach_study(const Cr3bpFlow& flow, const RotState& x,
                                                       const SectionSpec& spec, const std::vector<double>& rhos) {
  const MassRatio& mu = flow.mu();
  const double c = hamiltonian_rot(x, mu);
  std::vector<BindingApproachRow> rows(rhos.size());
  parallel_for(rhos.size(), [&](std::size_t i) {
    BindingApproachRow& row = rows[i];
    row.rho = rhos[i];
    try {
      RotState y = x;
      y.q.z() = rhos[i] * std::cos(spec.page);
      y.p.z() = rhos[i] * std::sin(spec.page);
      Eigen::Vector2d v(y.p.x() + y.q.y(), y.p.y() - y.q.x());
      const double want = 2.0 * (c - effective_potential(y.q, mu)) - y.p.z() * y.p.z();
      if (!(want > 0.0) || v.norm() == 0.0) fail(ErrorCode::kOffSurface, "no planar momentum left at this rho");
      v *= std::sqrt(want) / v.norm();
      y.p.x() = v.x() - y.q.y();
      y.p.y() = v.y() + y.q.x();
      const PageJacobian pj = return_map_jacobian(flow, y, spec);
      row.condition = pj.condition;
      row.symplecticity = pj.symplecticity;
      row.tau = pj.sample.tau;
    } catch (const Error& e) {
      row.error = error_code_name(e.code());
    }
  });
  return rows;
}

}  // namespace sectionscope
