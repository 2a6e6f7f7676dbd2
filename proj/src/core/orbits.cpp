#include "orbits.hpp"

#include "dynamics.hpp"
#include "error.hpp"

#include <cmath>
#include <sstream>

namespace sectionscope {

const char* symmetry_name(OrbitSymmetry s) {
  switch (s) {
    case OrbitSymmetry::kNone: return "none";
    case OrbitSymmetry::kPlanar: return "planar";
    case OrbitSymmetry::kSpatial: return "spatial";
    case OrbitSymmetry::kVerticalCollision: return "vertical-collision";
    case OrbitSymmetry::kSymmetricXAxis: return "symmetric-x-axis";
  }
  return "unknown";
}

namespace {

Vec3 primary_position(const MassRatio& mu, Primary p) { return p == Primary::kMoon ? mu.moon() : mu.earth(); }

Primary default_primary(const MassRatio& mu, const Vec3& q) {
  if (mu.moon_mass() == 0.0) return Primary::kEarth;
  if (mu.earth_mass() == 0.0) return Primary::kMoon;
  return nearest_primary(q, mu).first;
}

}  // namespace

void analyze_orbit(const Cr3bpFlow& flow, PeriodicOrbit& orbit) {
  const MassRatio& mu = flow.mu();
  const RotState& x = orbit.representative;
  PropagateOptions opt;
  opt.t_end = orbit.period;
  const PropagateResult r = flow.propagate({Chart::kRotating, x.packed(), 0.0}, hamiltonian_rot(x, mu), opt);
  const RotState end = flow.to_rot(r.end.chart, r.end.y);
  orbit.closure_error = (end.packed() - x.packed()).norm();
  const Vec3 at = primary_position(mu, orbit.primary);
  double min_b = std::numeric_limits<double>::infinity(), max_v = 0.0;
  double area = 0.0, prev_t = 0.0, prev_l = 0.0;
  bool first = true;
  for (const TrajectorySample& s : r.traj.samples) {
    if (is_moser(s.chart) && 1.0 - s.state[0] < 1e-9) continue;  // on the collision fiber
    const RotState y = flow.to_rot(s.chart, s.state);
    min_b = std::min(min_b, std::hypot(y.q.z(), y.p.z()));
    max_v = std::max(max_v, std::abs(y.q.z()) + std::abs(y.p.z()));
    const Vec3 d = y.q - at;
    const double l = d.x() * y.p.y() - d.y() * y.p.x();
    if (!first) area += 0.5 * (l + prev_l) * (s.t - prev_t);
    first = false;
    prev_t = s.t;
    prev_l = l;
  }
  orbit.min_binding = min_b;
  orbit.max_vertical = max_v;
  orbit.angular_momentum = orbit.period > 0.0 ? area / orbit.period : 0.0;
}

PeriodicOrbit find_periodic_point(const Cr3bpFlow& flow, const RotState& x0, int k, const SectionSpec& spec,
                                  const NewtonOptions& opt) {
  const MassRatio& mu = flow.mu();
  const double c = hamiltonian_rot(x0, mu);
  PeriodicOrbit orb;
  orb.page_form = true;
  orb.section = spec;
  orb.iterates = k;
  orb.energy = c;
  orb.mu = mu.value();
  orb.primary = default_primary(mu, x0.q);

  RotState x = x0;
  ReturnSample r = return_map(flow, x, spec, k);
  for (int it = 0;; ++it) {
    const double res = (r.fx.packed() - x.packed()).norm();
    orb.newton_history.push_back(res);
    if (res < opt.tol) {
      orb.representative = x;
      orb.period = r.tau;
      orb.residual = res;
      analyze_orbit(flow, orb);
      orb.symmetry = orb.max_vertical < 1e-8 ? OrbitSymmetry::kPlanar : OrbitSymmetry::kSpatial;
      return orb;
    }
    if (it >= opt.max_iter) break;

    const PageChart chart(mu, x, c, spec);
    const Eigen::Vector4d G = chart.coords(r.fx);
    const MatX M = replay_derivative(flow, x, c, r.log, chart.tangent(Eigen::Vector4d::Zero()), opt.h);
    Eigen::Matrix4d DG;
    for (int i = 0; i < 4; ++i) DG.col(i) = chart.basis().transpose() * chart.to_page(r.fx, M.col(i));
    DG -= Eigen::Matrix4d::Identity();
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(DG, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto sv = svd.singularValues();
    if (sv[3] < opt.singular_tol * std::max(1.0, sv[0])) {
      std::ostringstream os;
      os << "Newton Jacobian singular (sigma_min " << sv[3] << "): fixed points are not isolated here";
      fail(ErrorCode::kJacobianSingular, os.str());
    }
    const Eigen::Vector4d delta = svd.solve(-G);

    // Armijo backtracking on the residual.
    double lam = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12 && !accepted; ++ls, lam *= 0.5) {
      try {
        const RotState y = chart.point(lam * delta);
        ReturnSample ry = return_map(flow, y, spec, k);
        const double ny = (ry.fx.packed() - y.packed()).norm();
        if (ny <= (1.0 - 1e-4 * lam) * res) {
          x = y;
          r = std::move(ry);
          accepted = true;
        }
      } catch (const Error&) {
        // trial left the admissible set; shorten the step
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "line search stalled at residual " << res << " after " << it + 1 << " iterations";
      fail(ErrorCode::kNoConvergence, os.str());
    }
  }
  std::ostringstream os;
  os << "no convergence after " << opt.max_iter << " iterations, residual " << orb.newton_history.back();
  fail(ErrorCode::kNoConvergence, os.str());
}

namespace {

RotState axis_start(const MassRatio& mu, double c, double q1, double sign) {
  const double U = effective_potential(Vec3(q1, 0, 0), mu);
  const double v2 = 2.0 * (c - U);
  if (!(v2 > 0.0)) fail(ErrorCode::kOffSurface, "axis start outside the Hill region");
  const double p2 = q1 + (sign >= 0.0 ? 1.0 : -1.0) * std::sqrt(v2);
  return {Vec3(q1, 0, 0), Vec3(0, p2, 0)};
}

struct HalfShot {
  double p1 = 0.0;
  double t = 0.0;
};

HalfShot half_shot(const Cr3bpFlow& flow, double c, double q1, double sign) {
  const RotState s = axis_start(flow.mu(), c, q1, sign);
  PropagateOptions opt;
  opt.record_samples = false;
  EventSpec ev;
  ev.fn = [&flow](Chart ch, const VecX& y) { return flow.to_rot(ch, y).q.y(); };
  ev.direction = 0;
  opt.event = ev;
  const PropagateResult r = flow.propagate({Chart::kRotating, s.packed(), 0.0}, c, opt);
  return {flow.to_rot(r.end.chart, r.end.y).p.x(), r.end.t};
}

}  // namespace

double perpendicular_crossing_residual(const Cr3bpFlow& flow, double c, double q1, double p2_sign_hint,
                                       double* half_period) {
  const HalfShot h = half_shot(flow, c, q1, p2_sign_hint);
  if (half_period) *half_period = h.t;
  return h.p1;
}

PeriodicOrbit find_symmetric_planar_orbit(const Cr3bpFlow& flow, double c, double q1, double p2, Primary primary,
                                          const NewtonOptions& opt) {
  const MassRatio& mu = flow.mu();
  const double sign = p2 - q1 >= 0.0 ? 1.0 : -1.0;  // direction of q2-dot at the start
  PeriodicOrbit orb;
  orb.page_form = false;
  orb.energy = c;
  orb.mu = mu.value();
  orb.primary = primary;
  orb.symmetry = OrbitSymmetry::kSymmetricXAxis;

  double x = q1;
  HalfShot cur = half_shot(flow, c, x, sign);
  const double dq = 1e-7;
  for (int it = 0;; ++it) {
    orb.newton_history.push_back(std::abs(cur.p1));
    if (std::abs(cur.p1) < 1e-12) break;
    if (it >= opt.max_iter) {
      std::ostringstream os;
      os << "symmetric shooting did not converge, |p1| = " << std::abs(cur.p1);
      fail(ErrorCode::kNoConvergence, os.str());
    }
    const double d = (half_shot(flow, c, x + dq, sign).p1 - half_shot(flow, c, x - dq, sign).p1) / (2 * dq);
    if (!(std::abs(d) > 1e-14)) fail(ErrorCode::kJacobianSingular, "shooting derivative vanishes");
    const double step = -cur.p1 / d;
    double lam = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12 && !accepted; ++ls, lam *= 0.5) {
      try {
        const HalfShot t = half_shot(flow, c, x + lam * step, sign);
        if (std::abs(t.p1) <= (1.0 - 1e-4 * lam) * std::abs(cur.p1)) {
          x += lam * step;
          cur = t;
          accepted = true;
        }
      } catch (const Error&) {
      }
    }
    if (!accepted) {
      // At the noise floor of the integrator the residual cannot shrink further.
      if (std::abs(cur.p1) < 1e-10) break;
      fail(ErrorCode::kNoConvergence, "symmetric shooting line search stalled");
    }
  }
  orb.representative = axis_start(mu, c, x, sign);
  orb.period = 2.0 * cur.t;
  analyze_orbit(flow, orb);
  orb.residual = orb.closure_error;
  return orb;
}

int unit_multiplier_count(const std::vector<std::complex<double>>& m, double tol) {
  int n = 0;
  for (const auto& l : m) n += std::abs(l - 1.0) < tol ? 1 : 0;
  return n;
}

std::vector<std::complex<double>> floquet_multipliers(const Cr3bpFlow& flow, PeriodicOrbit& orbit,
                                                      const FloquetOptions& opt) {
  const MassRatio& mu = flow.mu();
  const RotState& x = orbit.representative;
  const double T = orbit.period;
  PropagateOptions po;
  po.t_end = T;
  po.record_samples = false;
  const PropagateResult nominal = flow.propagate({Chart::kRotating, x.packed(), 0.0}, hamiltonian_rot(x, mu), po);

  // Time-T map: replay the step log at the start's own energy, then undo the
  // physical-time mismatch of the Moser segments along X_H.
  auto shoot = [&](const Vec6& y0) {
    const RotState s = RotState::unpack(y0);
    const FlowPoint e = flow.replay({Chart::kRotating, y0, 0.0}, hamiltonian_rot(s, mu), nominal.log);
    const RotState er = flow.to_rot(e.chart, e.y);
    return Vec6(er.packed() - hamiltonian_vector_field(er, mu) * (e.t - T));
  };
  auto column = [&](const Vec6& d) {
    return Vec6((shoot(x.packed() + opt.h * d) - shoot(x.packed() - opt.h * d)) / (2.0 * opt.h));
  };

  const Vec6 xh = hamiltonian_vector_field(x, mu).normalized();
  const Vec6 n = hamiltonian_gradient(x, mu).normalized();
  std::vector<std::complex<double>> out;
  out.push_back(xh.dot(column(xh)));
  out.push_back(n.dot(column(n)));

  const DarbouxFrame fr = darboux_frame(x, mu);
  Eigen::Matrix4d J;
  for (int i = 0; i < 4; ++i) J.col(i) = fr.coords(column(fr.basis.col(i)));
  Eigen::EigenSolver<Eigen::Matrix4d> es(J, false);
  for (int i = 0; i < 4; ++i) out.push_back(es.eigenvalues()[i]);
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(J);
  const double cond = svd.singularValues()[0] / svd.singularValues()[3];

  orbit.floquet = out;
  orbit.floquet_reciprocal = reciprocal_pair_residual(out);
  orbit.floquet_ill_conditioned = !(cond <= opt.ill_conditioned);
  return out;
}

namespace {

PeriodicOrbit solve_member(const PeriodicOrbit& prev, const IntegratorConfig& cfg, const ContinuationOptions& opt,
                           double value) {
  const double mu_v = opt.param == ContinuationParam::kMu ? value : prev.mu;
  const double c = opt.param == ContinuationParam::kEnergy ? value : prev.energy;
  if (!(mu_v >= 0.0 && mu_v < 1.0)) fail(ErrorCode::kInvalidArgument, "mass ratio left [0, 1)");
  const MassRatio mu(mu_v);
  const Cr3bpFlow flow(mu, cfg);
  PeriodicOrbit o;
  RotState pred;
  if (prev.page_form) {
    pred = PageChart(mu, prev.representative, c, prev.section).point(Eigen::Vector4d::Zero());
    o = find_periodic_point(flow, pred, prev.iterates, prev.section, opt.newton);
    if (prev.symmetry == OrbitSymmetry::kVerticalCollision) o.symmetry = prev.symmetry;
    o.primary = prev.primary;
  } else {
    pred = prev.representative;
    o = find_symmetric_planar_orbit(flow, c, prev.representative.q.x(), prev.representative.p.y(), prev.primary,
                                    opt.newton);
  }
  const double jump = (o.representative.packed() - pred.packed()).norm();
  if (jump > opt.max_jump) {
    std::ostringstream os;
    os << "re-converged member moved " << jump << " from its predictor";
    fail(ErrorCode::kNoConvergence, os.str());
  }
  return o;
}

}  // namespace

ContinuationResult continue_family(const PeriodicOrbit& seed, const IntegratorConfig& cfg,
                                   const ContinuationOptions& opt) {
  if (!(opt.step != 0.0 && std::isfinite(opt.step))) fail(ErrorCode::kInvalidArgument, "continuation step is zero");
  if (opt.count < 0) fail(ErrorCode::kInvalidArgument, "continuation count is negative");
  ContinuationResult res;
  res.members.push_back(seed);
  const double start = opt.param == ContinuationParam::kMu ? seed.mu : seed.energy;
  const double min_sub = std::abs(opt.step) / std::pow(2.0, opt.max_halvings);
  PeriodicOrbit cur = seed;
  double at = start;
  for (int i = 1; i <= opt.count; ++i) {
    const double target = start + i * opt.step;
    double sub = opt.step;
    while (at != target) {
      const double next = std::abs(target - at) <= std::abs(sub) ? target : at + sub;
      try {
        cur = solve_member(cur, cfg, opt, next);
        at = next;
      } catch (const Error& e) {
        sub *= 0.5;
        if (std::abs(sub) < min_sub * (1.0 - 1e-12)) {
          std::ostringstream os;
          os << "continuation stopped before " << target << ": " << e.what();
          res.stop_code = ErrorCode::kFoldDetected;
          res.stop_reason = os.str();
          return res;
        }
      }
    }
    res.members.push_back(cur);
  }
  res.complete = true;
  return res;
}

EllipsoidPeriodicPoint find_ellipsoid_periodic_point(double a, double b, std::complex<double> z1, double theta, int k,
                                                     const NewtonOptions& opt) {
  EllipsoidPeriodicPoint out;
  std::complex<double> z = z1;
  for (int it = 0; it <= opt.max_iter; ++it) {
    const std::complex<double> G = ellipsoid_page_map(a, b, z, theta, k) - z;
    out.iterations = it;
    out.residual = std::abs(G);
    out.z1 = z;
    Eigen::Matrix2d DG;
    const std::complex<double> dirs[2] = {{opt.h, 0.0}, {0.0, opt.h}};
    for (int j = 0; j < 2; ++j) {
      const std::complex<double> d = (ellipsoid_page_map(a, b, z + dirs[j], theta, k) -
                                      ellipsoid_page_map(a, b, z - dirs[j], theta, k)) / (2.0 * opt.h);
      DG(0, j) = d.real();
      DG(1, j) = d.imag();
    }
    DG -= Eigen::Matrix2d::Identity();
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(DG, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues()[1] < opt.singular_tol * std::max(1.0, svd.singularValues()[0])) {
      fail(ErrorCode::kJacobianSingular, "ellipsoid page map minus identity is singular: periodic points form a continuum");
    }
    // checked after the singularity test so a continuum is never reported as a point
    if (out.residual < opt.tol) return out;
    const Eigen::Vector2d step = svd.solve(-Eigen::Vector2d(G.real(), G.imag()));
    z += std::complex<double>(step[0], step[1]);
  }
  fail(ErrorCode::kNoConvergence, "ellipsoid Newton did not converge");
}

}  // namespace sectionscope
