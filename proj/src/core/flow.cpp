#include "flow.hpp"

#include "dynamics.hpp"
#include "error.hpp"
#include "regularization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sectionscope {

const char* chart_name(Chart c) {
  switch (c) {
    case Chart::kRotating: return "rotating";
    case Chart::kMoserEarth: return "moser-earth";
    case Chart::kMoserMoon: return "moser-moon";
  }
  return "unknown";
}

Primary chart_primary(Chart c) { return c == Chart::kMoserEarth ? Primary::kEarth : Primary::kMoon; }

Chart moser_chart(Primary p) { return p == Primary::kEarth ? Chart::kMoserEarth : Chart::kMoserMoon; }

void IntegratorConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::kInvalidArgument, what); };
  if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) bad("rel_tol must lie in (0, 1e-3]");
  if (!(abs_tol > 0.0 && abs_tol <= 1e-3)) bad("abs_tol must lie in (0, 1e-3]");
  if (!(collision_switch_radius > 0.0 && collision_switch_radius <= 0.2)) {
    bad("collision_switch_radius must lie in (0, 0.2]");
  }
  if (!(max_time > 0.0)) bad("max_time must be positive");
  if (!(max_step >= 0.0)) bad("max_step must be non-negative");
}

namespace {

int state_size(Chart c) { return is_moser(c) ? 8 : 6; }

// Integration vector: the chart state, plus physical time for Moser charts.
VecX pack(const FlowPoint& p) {
  if (!is_moser(p.chart)) return p.y;
  VecX v(9);
  v << p.y, p.t;
  return v;
}

FlowPoint unpack(Chart chart, const VecX& v, double s) {
  if (!is_moser(chart)) return {chart, v, s};
  return {chart, v.head<8>(), v[8]};
}

VecX project_moser(const VecX& v) {
  const MoserState m = project_constraints(MoserState::unpack(v.head<8>()));
  VecX out = v;
  out.head<8>() = m.packed();
  return out;
}

// Illinois false position on [a, b] with fa, fb of opposite sign.
template <class F>
double refine_root(const F& fn, double a, double b, double fa, double fb) {
  double side = 0;
  double x = b, fx = fb;
  for (int it = 0; it < 200; ++it) {
    x = (a * fb - b * fa) / (fb - fa);
    if (!(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
    fx = fn(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (fb > 0)) {
      b = x;
      fb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = fx;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    const double width = std::abs(b - a);
    if (width <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) break;
    if (std::abs(fx) < 1e-15) break;
  }
  return x;
}

bool crosses(double e0, double e1, int direction) {
  const bool up = e0 < 0.0 && e1 >= 0.0;
  const bool down = e0 > 0.0 && e1 <= 0.0;
  if (direction > 0) return up;
  if (direction < 0) return down;
  return up || down;
}

}  // namespace

Cr3bpFlow::Cr3bpFlow(const MassRatio& mu, const IntegratorConfig& cfg) : mu_(mu), cfg_(cfg) { cfg_.validate(); }

RotState Cr3bpFlow::to_rot(Chart chart, const VecX& y) const {
  if (!is_moser(chart)) return RotState::unpack(y);
  return moser_to_rot(MoserState::unpack(y.head<8>()), mu_, chart_primary(chart));
}

VecX Cr3bpFlow::from_rot(const RotState& s, Chart chart) const {
  if (!is_moser(chart)) return s.packed();
  return rot_to_moser(s, mu_, chart_primary(chart)).packed();
}

double Cr3bpFlow::energy(Chart chart, const VecX& y) const {
  if (is_moser(chart) && 1.0 - y[0] < 1e-9) return std::numeric_limits<double>::quiet_NaN();
  return hamiltonian_rot(to_rot(chart, y), mu_);
}

FlowPoint Cr3bpFlow::convert(const FlowPoint& p, Chart target) const {
  if (p.chart == target) return p;
  return {target, from_rot(to_rot(p.chart, p.y), target), p.t};
}

Rhs Cr3bpFlow::rhs(Chart chart, double c) const {
  const MassRatio mu = mu_;
  if (!is_moser(chart)) {
    return [mu](double, const VecX& y, VecX& d) { d = hamiltonian_vector_field(RotState::unpack(y), mu); };
  }
  const Primary pr = chart_primary(chart);
  const double g = chart_coupling(mu, pr);
  return [mu, pr, g, c](double, const VecX& y, VecX& d) {
    const MoserState m = MoserState::unpack(y.head<8>());
    d.resize(9);
    d.head<8>() = project_to_cotangent_sphere(m, regularized_gradient(m, c, mu, pr));
    d[8] = physical_time_rate(m, g);
  };
}

std::optional<Chart> Cr3bpFlow::switch_target(Chart chart, const VecX& y) const {
  if (!cfg_.switching) return std::nullopt;
  const double r = cfg_.collision_switch_radius;
  if (!is_moser(chart)) {
    const Vec3 q = y.head<3>();
    if (mu_.moon_mass() > 0.0 && (q - mu_.moon()).norm() < r) return Chart::kMoserMoon;
    if (mu_.earth_mass() > 0.0 && (q - mu_.earth()).norm() < r) return Chart::kMoserEarth;
    return std::nullopt;
  }
  const MoserState m = MoserState::unpack(y.head<8>());
  if ((1.0 - m.xi[0]) * m.eta.norm() > 2.0 * r) return Chart::kRotating;
  return std::nullopt;
}

double Cr3bpFlow::abs_tol(Chart chart) const {
  if (!is_moser(chart)) return cfg_.abs_tol;
  // eta scales with the coupling on the level Q = g^2/2
  return cfg_.abs_tol * std::clamp(chart_coupling(mu_, chart_primary(chart)), 1e-6, 1.0);
}

PropagateResult Cr3bpFlow::propagate(const FlowPoint& start, double c, const PropagateOptions& opt) const {
  const int dir = opt.direction >= 0 ? 1 : -1;
  PropagateResult res;
  FlowPoint cur = start;
  if (cur.y.size() != state_size(cur.chart)) fail(ErrorCode::kInvalidArgument, "state size does not match chart");
  if (is_moser(cur.chart)) {
    const double r0 = MoserState::unpack(cur.y).constraint_residual();
    if (r0 > 1e-6) fail(ErrorCode::kConstraintDrift, "start state is off T*S^3");
    cur.y = project_constraints(MoserState::unpack(cur.y)).packed();
  } else {
    hamiltonian_rot(RotState::unpack(cur.y), mu_);  // collision check
  }

  Trajectory& traj = res.traj;
  traj.energy = c;
  double worst_drift = 0.0;
  auto record = [&](const FlowPoint& p, double resid) {
    const double e = energy(p.chart, p.y);
    if (std::isfinite(e)) {
      bool near = false;
      if (is_moser(p.chart)) near = (1.0 - p.y[0]) * p.y.segment<4>(4).norm() < 1e-3;
      if (!near) worst_drift = std::max(worst_drift, std::abs(e - c) / std::max(std::abs(c), 1e-300));
    }
    if (opt.record_samples) traj.samples.push_back({p.t, p.chart, p.y, e, resid});
  };
  record(cur, 0.0);

  const double t0 = cur.t;
  const bool has_t_end = std::isfinite(opt.t_end);
  if (has_t_end && dir * (opt.t_end - t0) <= 0.0) {
    res.end = cur;
    return res;
  }

  Chart chart = cur.chart;
  Dop853 rk(rhs(chart, c), cfg_.rel_tol, abs_tol(chart), cfg_.max_step);
  double s = is_moser(chart) ? 0.0 : cur.t;
  rk.reset(s, pack(cur), dir);
  int accepted_events = 0;
  bool first_step = true;

  for (;;) {
    rk.step();
    DenseStep d = rk.dense();
    res.log.push_back({chart, rk.last_h()});
    VecX yn = rk.y();
    double resid = 0.0;
    if (is_moser(chart)) {
      resid = MoserState::unpack(yn.head<8>()).constraint_residual();
      if (resid > 1e-6) {
        std::ostringstream os;
        os << "constraint residual " << resid << " after step at t = " << yn[8];
        fail(ErrorCode::kConstraintDrift, os.str());
      }
      yn = project_moser(yn);
      rk.set_state(yn);
    }
    const int n = state_size(chart);
    const FlowPoint prev = unpack(chart, d.y_old, d.t_old);
    const FlowPoint next = unpack(chart, yn, rk.t());
    if (opt.observer) opt.observer(chart, next.y);

    // Earliest stop inside this step, as chart time.
    std::optional<double> stop;
    if (has_t_end && dir * (next.t - opt.t_end) >= 0.0) {
      if (!is_moser(chart)) {
        stop = opt.t_end;
      } else {
        auto ft = [&](double x) { return dir * (d(x)[8] - opt.t_end); };
        stop = refine_root(ft, d.t_old, d.t_new(), ft(d.t_old), ft(d.t_new()));
      }
    }
    if (opt.event) {
      const EventSpec& ev = *opt.event;
      double e0 = ev.fn(chart, prev.y);
      const double e1 = ev.fn(chart, next.y);
      if (first_step && std::abs(e0) < 1e-10) e0 = 0.0;
      if (crosses(e0, e1, ev.direction)) {
        ++res.event_roots;
        auto fe = [&](double x) { return ev.fn(chart, d(x).head(n)); };
        const double root = refine_root(fe, d.t_old, d.t_new(), e0 == 0.0 ? fe(d.t_old) : e0, e1);
        const VecX at = d(root).head(n);
        const bool small = std::abs(ev.fn(chart, at)) < ev.max_residual;
        if (small && (!ev.accept || ev.accept(chart, at))) {
          ++accepted_events;
          if (accepted_events >= ev.occurrence) {
            if (!stop || dir * (root - *stop) < 0.0) {
              stop = root;
              res.event_found = true;
            }
          }
        }
      }
    }
    first_step = false;

    if (stop) {
      const VecX v = d(*stop);
      FlowPoint end = unpack(chart, v, *stop);
      if (is_moser(chart)) end.y = project_constraints(MoserState::unpack(end.y)).packed();
      res.log.back().h = *stop - d.t_old;
      if (opt.record_segments) traj.segments.push_back({chart, d, *stop});
      record(end, resid);
      res.end = end;
      res.chart_time = *stop;
      traj.energy_drift = worst_drift;
      return res;
    }

    if (opt.record_segments) traj.segments.push_back({chart, d, d.t_new()});
    record(next, resid);
    if (std::abs(next.t - t0) > cfg_.max_time) {
      std::ostringstream os;
      os << "max_time " << cfg_.max_time << " exceeded after " << res.log.size() << " steps";
      fail(ErrorCode::kMaxTime, os.str());
    }

    if (const auto target = switch_target(chart, next.y)) {
      cur = convert(next, *target);
      chart = *target;
      ++traj.chart_switches;
      rk = Dop853(rhs(chart, c), cfg_.rel_tol, abs_tol(chart), cfg_.max_step);
      rk.reset(is_moser(chart) ? 0.0 : cur.t, pack(cur), dir);
    }
  }
}

FlowPoint Cr3bpFlow::replay(const FlowPoint& start, double c, const StepLog& log, int direction) const {
  FlowPoint cur = start;
  if (is_moser(cur.chart)) cur.y = project_constraints(MoserState::unpack(cur.y)).packed();
  Chart chart = cur.chart;
  Dop853 rk(rhs(chart, c), cfg_.rel_tol, abs_tol(chart), cfg_.max_step);
  double s = is_moser(chart) ? 0.0 : cur.t;
  rk.reset(s, pack(cur), direction, 1.0);
  for (const StepRecord& rec : log) {
    if (rec.chart != chart) {
      cur = convert(unpack(chart, rk.y(), rk.t()), rec.chart);
      chart = rec.chart;
      rk = Dop853(rhs(chart, c), cfg_.rel_tol, abs_tol(chart), cfg_.max_step);
      rk.reset(is_moser(chart) ? 0.0 : cur.t, pack(cur), direction, 1.0);
    }
    rk.step_fixed(rec.h);
    if (is_moser(chart)) rk.set_state(project_moser(rk.y()));
  }
  return unpack(chart, rk.y(), rk.t());
}

Trajectory Cr3bpFlow::integrate(const RotState& start, double duration, bool record_segments) const {
  PropagateOptions opt;
  opt.t_end = duration;
  opt.direction = duration >= 0.0 ? 1 : -1;
  opt.record_segments = record_segments;
  const FlowPoint p{Chart::kRotating, start.packed(), 0.0};
  return propagate(p, hamiltonian_rot(start, mu_), opt).traj;
}

Crossing event_crossing(const Cr3bpFlow& flow, const Trajectory& traj, const ChartFunction& fn, int direction) {
  (void)flow;
  for (const TrajectorySegment& seg : traj.segments) {
    const int n = state_size(seg.chart);
    const DenseStep& d = seg.dense;
    auto f = [&](double x) { return fn(seg.chart, d(x).head(n)); };
    const double a = d.t_old, b = seg.end;
    const double e0 = f(a), e1 = f(b);
    const bool strict = direction > 0 ? (e0 < 0 && e1 > 0) : direction < 0 ? (e0 > 0 && e1 < 0) : (e0 * e1 < 0);
    if (!strict) continue;
    const double root = refine_root(f, a, b, e0, e1);
    const VecX v = d(root);
    if (std::abs(fn(seg.chart, v.head(n))) > 1e-9) continue;
    Crossing out;
    out.point = unpack(seg.chart, v, root);
    out.t = out.point.t;
    return out;
  }
  fail(ErrorCode::kNoCrossing, "no sign change of the event function with the requested direction");
}

}  // namespace sectionscope
