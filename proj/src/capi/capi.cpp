#define SECTIONSCOPE_BUILD
#include "sectionscope/sectionscope.h"

#include "dynamics.hpp"
#include "error.hpp"
#include "flow.hpp"
#include "hill.hpp"
#include "io.hpp"
#include "orbits.hpp"
#include "return_map.hpp"
#include "sections.hpp"
#include "stark_zeeman.hpp"
#include "verify.hpp"

#include <functional>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

using namespace sectionscope;

struct ss_context {
  RunConfig cfg;
  std::string command;
  std::string hash;
  std::string canonical;
  MassRatio mu;

  OutputMeta meta() const { return {hash, command}; }
  Cr3bpFlow flow(double m) const { return Cr3bpFlow(MassRatio(m), cfg.integrator); }
  Cr3bpFlow flow() const { return flow(cfg.mu); }
  double energy() const {
    if (cfg.c) return *cfg.c;
    if (cfg.mu == 0.0) return -2.0;
    return lagrange_points(mu).energies[0] - 0.1;
  }
};

struct ss_hill {
  HillGrid grid;
  MassRatio mu;
  OutputMeta meta;
};

struct ss_trajectory {
  Trajectory traj;
  std::vector<RotState> rot;
  OutputMeta meta;
};

struct ss_scan {
  std::vector<ScanRow> rows;
  OutputMeta meta;
};

struct ss_orbit {
  PeriodicOrbit orbit;
};

struct ss_family {
  ContinuationResult result;
  std::vector<ss_orbit> members;
};

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  Json detail;
};

struct ss_report {
  std::string suite;
  std::vector<Check> checks;
};

namespace {

thread_local std::string g_last_error;

// Runs f, mapping exceptions to status codes and the thread-local message.
template <class F>
int guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return SS_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SS_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SS_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

RotState rot_from(const double* s) {
  RotState r;
  r.q = Vec3(s[0], s[1], s[2]);
  r.p = Vec3(s[3], s[4], s[5]);
  return r;
}

void copy_state(const RotState& s, double* out) {
  const Vec6 v = s.packed();
  for (int i = 0; i < 6; ++i) out[i] = v[i];
}

PeriodicOrbit vertical_collision_orbit(const ss_context& ctx, const NewtonOptions& nopt) {
  const double c = ctx.energy();
  if (!(c < 0.0)) fail(ErrorCode::kInvalidArgument, "vertical collision orbits need c < 0");
  const SectionSpec spec{AngleKind::kPhysical, 0.0};
  const Cr3bpFlow kepler = ctx.flow(0.0);
  // Kepler at mu = 0: the apex at rest sits at height -1/c.
  PeriodicOrbit seed = find_periodic_point(kepler, {Vec3(0, 0, -1.0 / c), Vec3::Zero()}, 1, spec, nopt);
  seed.symmetry = OrbitSymmetry::kVerticalCollision;
  seed.primary = Primary::kEarth;
  if (ctx.cfg.mu == 0.0) return seed;
  ContinuationOptions co;
  co.param = ContinuationParam::kMu;
  co.count = std::max(1, static_cast<int>(std::ceil(ctx.cfg.mu / 1e-3 - 1e-9)));
  co.step = ctx.cfg.mu / co.count;
  co.newton = nopt;
  const ContinuationResult r = continue_family(seed, ctx.cfg.integrator, co);
  if (!r.complete) fail(r.stop_code, r.stop_reason);
  return r.members.back();
}

Check run_check(const char* name, double tol, const std::function<void(Check&)>& body) {
  Check ch;
  ch.name = name;
  ch.tolerance = tol;
  try {
    body(ch);
  } catch (const Error& e) {
    ch.passed = false;
    ch.detail["error"] = error_code_name(e.code());
    ch.detail["message"] = e.what();
  }
  return ch;
}

Json assumption_json(const AssumptionReport& r) {
  return {{"samples", r.samples},
          {"magnetic_ok", r.magnetic_ok},
          {"symmetry_ok", r.symmetry_ok},
          {"positivity_ok", r.positivity_ok},
          {"identity_ok", r.identity_ok},
          {"failed", r.failed},
          {"witness", {r.witness.x(), r.witness.y(), r.witness.z()}},
          {"witness_value", r.witness_value},
          {"min_vertical_stiffness", r.min_vertical_stiffness}};
}

}  // namespace

extern "C" {

const char* ss_version(void) { return library_version(); }

const char* ss_status_name(int status) {
  if (status < 0 || status > SS_INTERNAL) return "unknown";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* ss_last_error(void) { return g_last_error.c_str(); }

int ss_context_create(const char* config_json, const char* command_line, ss_context** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto ctx = std::make_unique<ss_context>();
    ctx->cfg = parse_run_config_text(config_json && *config_json ? config_json : "{}");
    ctx->mu = MassRatio(ctx->cfg.mu);
    ctx->command = command_line ? command_line : "";
    ctx->canonical = run_config_json(ctx->cfg).dump();
    ctx->hash = config_hash(ctx->cfg);
    *out = ctx.release();
  });
}

void ss_context_destroy(ss_context* ctx) { delete ctx; }

double ss_context_mu(const ss_context* ctx) { return ctx ? ctx->cfg.mu : std::nan(""); }

int ss_context_energy(const ss_context* ctx, double* c) {
  return guarded([&] {
    need(ctx, "ctx");
    need(c, "c");
    *c = ctx->energy();
  });
}

const char* ss_context_config_hash(const ss_context* ctx) { return ctx ? ctx->hash.c_str() : ""; }

const char* ss_context_config_json(const ss_context* ctx) { return ctx ? ctx->canonical.c_str() : ""; }

int ss_lagrange(const ss_context* ctx, double* points, double* energies, int* ordering_ok) {
  return guarded([&] {
    need(ctx, "ctx");
    const LagrangePointSet lp = lagrange_points(ctx->mu);
    for (int i = 0; i < 5; ++i) {
      if (points) {
        for (int k = 0; k < 3; ++k) points[3 * i + k] = lp.points[i][k];
      }
      if (energies) energies[i] = lp.energies[i];
    }
    if (ordering_ok) *ordering_ok = lp.ordering_ok();
  });
}

int ss_lagrange_write(const ss_context* ctx, const char* json_path, int* ordering_ok) {
  return guarded([&] {
    need(ctx, "ctx");
    need(json_path, "json_path");
    const LagrangePointSet lp = lagrange_points(ctx->mu);
    write_json_file(json_path, lagrange_json(lp, ctx->mu), ctx->meta());
    if (ordering_ok) *ordering_ok = lp.ordering_ok();
  });
}

int ss_hill_compute(const ss_context* ctx, int resolution, int planar, ss_hill** out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(out, "out");
    *out = nullptr;
    if (resolution < 2 || resolution > 4096) fail(ErrorCode::kInvalidArgument, "grid resolution must lie in [2, 4096]");
    if (!planar && resolution > 512) fail(ErrorCode::kInvalidArgument, "spatial grids are limited to 512^3");
    auto h = std::make_unique<ss_hill>();
    h->grid = hill_components(ctx->energy(), ctx->mu, GridBox{}, resolution, planar != 0);
    h->mu = ctx->mu;
    h->meta = ctx->meta();
    *out = h.release();
  });
}

void ss_hill_destroy(ss_hill* h) { delete h; }
int ss_hill_components(const ss_hill* h) { return h ? h->grid.components : -1; }
int ss_hill_bounded_components(const ss_hill* h) { return h ? h->grid.bounded_count() : -1; }
int ss_hill_resolution_warning(const ss_hill* h) { return h ? h->grid.resolution_warning : 0; }

int ss_hill_write(const ss_hill* h, const char* csv_path, const char* json_path) {
  return guarded([&] {
    need(h, "h");
    if (csv_path) {
      std::ofstream os = open_output(csv_path);
      write_hill_csv(os, h->grid, h->meta);
    }
    if (json_path) write_json_file(json_path, hill_summary_json(h->grid, h->mu), h->meta);
  });
}

int ss_integrate(const ss_context* ctx, const double* state, double duration, ss_trajectory** out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(state, "state");
    need(out, "out");
    *out = nullptr;
    if (!(duration > 0.0 && std::isfinite(duration))) fail(ErrorCode::kInvalidArgument, "duration must be positive");
    const Cr3bpFlow flow = ctx->flow();
    auto t = std::make_unique<ss_trajectory>();
    t->traj = flow.integrate(rot_from(state), duration);
    t->rot.reserve(t->traj.samples.size());
    for (const TrajectorySample& s : t->traj.samples) {
      // the collision fiber has no rotating image
      if (is_moser(s.chart) && 1.0 - s.state[0] < 1e-12) {
        RotState nan;
        nan.q.setConstant(std::nan(""));
        nan.p.setConstant(std::nan(""));
        t->rot.push_back(nan);
      } else {
        t->rot.push_back(flow.to_rot(s.chart, s.state));
      }
    }
    t->meta = ctx->meta();
    *out = t.release();
  });
}

void ss_trajectory_destroy(ss_trajectory* t) { delete t; }
size_t ss_trajectory_size(const ss_trajectory* t) { return t ? t->traj.samples.size() : 0; }
double ss_trajectory_energy_drift(const ss_trajectory* t) { return t ? t->traj.energy_drift : std::nan(""); }
int ss_trajectory_chart_switches(const ss_trajectory* t) { return t ? t->traj.chart_switches : -1; }

int ss_trajectory_sample(const ss_trajectory* t, size_t i, double* time, double* rot_state, double* energy) {
  return guarded([&] {
    need(t, "t");
    if (i >= t->traj.samples.size()) fail(ErrorCode::kInvalidArgument, "sample index out of range");
    if (time) *time = t->traj.samples[i].t;
    if (rot_state) copy_state(t->rot[i], rot_state);
    if (energy) *energy = t->traj.samples[i].energy;
  });
}

int ss_trajectory_write_jsonl(const ss_trajectory* t, const char* path) {
  return guarded([&] {
    need(t, "t");
    need(path, "path");
    std::ofstream os = open_output(path);
    write_trajectory_jsonl(os, t->traj, t->meta);
  });
}

int ss_section_scan(const ss_context* ctx, int n, int primary, int jacobians, ss_scan** out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(out, "out");
    *out = nullptr;
    if (n < 1) fail(ErrorCode::kInvalidArgument, "scan size must be positive");
    if (primary != 0 && primary != 1) fail(ErrorCode::kInvalidArgument, "primary must be 0 (Earth) or 1 (Moon)");
    ScanOptions so;
    so.n = n;
    so.seed = ctx->cfg.seed;
    so.section = ctx->cfg.section;
    so.sampler.primary = primary ? Primary::kMoon : Primary::kEarth;
    so.sampler.seed = ctx->cfg.seed;
    so.jacobians = jacobians != 0;
    auto s = std::make_unique<ss_scan>();
    s->rows = section_scan(ctx->flow(), ctx->energy(), so);
    s->meta = ctx->meta();
    *out = s.release();
  });
}

void ss_scan_destroy(ss_scan* s) { delete s; }
size_t ss_scan_size(const ss_scan* s) { return s ? s->rows.size() : 0; }

int ss_scan_row_get(const ss_scan* s, size_t i, ss_scan_row* row) {
  return guarded([&] {
    need(s, "s");
    need(row, "row");
    if (i >= s->rows.size()) fail(ErrorCode::kInvalidArgument, "row index out of range");
    const ScanRow& r = s->rows[i];
    row->index = r.index;
    copy_state(r.x, row->x);
    copy_state(r.fx, row->fx);
    row->tau = r.tau;
    row->energy = r.energy;
    row->energy_error = r.energy_error;
    row->symplecticity = r.symplecticity;
    row->leaf_delta = r.leaf_delta;
    row->min_binding = r.min_binding;
    row->binding_warning = r.binding_warning;
    row->error = SS_OK;
    if (!r.error.empty()) {
      row->error = SS_INTERNAL;
      for (int k = 0; k <= SS_INTERNAL; ++k) {
        if (r.error == error_code_name(static_cast<ErrorCode>(k))) row->error = k;
      }
    }
  });
}

size_t ss_scan_recurrent(const ss_scan* s, double delta) {
  if (!s) return 0;
  size_t n = 0;
  for (const ScanRow& r : s->rows) n += r.error.empty() && r.leaf_delta < delta ? 1 : 0;
  return n;
}

int ss_scan_write_csv(const ss_scan* s, const char* path) {
  return guarded([&] {
    need(s, "s");
    need(path, "path");
    std::ofstream os = open_output(path);
    write_scan_csv(os, s->rows, s->meta);
  });
}

int ss_ellipsoid_scan(const ss_context* ctx, double a, double b, int n, const char* csv_path, double* max_error) {
  return guarded([&] {
    need(ctx, "ctx");
    if (!(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))) {
      fail(ErrorCode::kInvalidArgument, "ellipsoid needs a, b > 0");
    }
    if (n < 1) fail(ErrorCode::kInvalidArgument, "scan size must be positive");
    std::mt19937_64 rng(ctx->cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double theta = ctx->cfg.section.page;
    const double predicted = std::remainder(kTwoPi * a / b, kTwoPi);
    const double r_max = 0.9 * std::sqrt(a / kPi);
    std::unique_ptr<std::ofstream> os;
    if (csv_path) {
      os = std::make_unique<std::ofstream>(open_output(csv_path));
      write_csv_header(*os, ctx->meta(),
                       {"index", "a", "b", "z1_re", "z1_im", "fz1_re", "fz1_im", "tau", "rotation", "predicted",
                        "error"});
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::complex<double> z1 = std::polar(r_max * std::sqrt(0.01 + 0.99 * u(rng)), kTwoPi * u(rng));
      const EllipsoidReturn r = ellipsoid_return(a, b, ellipsoid_page_point(a, b, z1, theta), theta);
      const double err = std::abs(std::remainder(r.rotation - predicted, kTwoPi));
      worst = std::max(worst, err);
      if (os) {
        *os << i;
        for (double v : {a, b, z1.real(), z1.imag(), r.fz[0].real(), r.fz[0].imag(), r.tau, r.rotation, predicted,
                         err}) {
          *os << ',' << format_double(v);
        }
        *os << '\n';
      }
    }
    if (max_error) *max_error = worst;
  });
}

int ss_find_orbit(const ss_context* ctx, const char* mode, const double* guess, int iterates, double tol,
                  ss_orbit** out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(mode, "mode");
    need(out, "out");
    *out = nullptr;
    NewtonOptions nopt;
    if (tol > 0.0) nopt.tol = tol;
    const std::string m = mode;
    auto o = std::make_unique<ss_orbit>();
    if (m == "vertical-collision") {
      o->orbit = vertical_collision_orbit(*ctx, nopt);
    } else if (m == "retrograde" || m == "direct") {
      if (ctx->cfg.mu == 0.0) fail(ErrorCode::kInvalidArgument, "lunar orbits need mu > 0");
      const double q1 = guess ? guess[0] : ctx->mu.moon().x() + 0.05;
      const double sign = m == "retrograde" ? -1.0 : 1.0;
      o->orbit = find_symmetric_planar_orbit(ctx->flow(), ctx->energy(), q1, q1 + sign, Primary::kMoon, nopt);
      const bool retro = o->orbit.angular_momentum < 0.0;
      if (retro != (m == "retrograde")) {
        fail(ErrorCode::kNoConvergence, "shooting converged to the " + std::string(retro ? "retrograde" : "direct") +
                                            " branch instead");
      }
    } else if (m == "page") {
      need(guess, "guess");
      if (iterates < 1) fail(ErrorCode::kInvalidArgument, "iterates must be at least 1");
      o->orbit = find_periodic_point(ctx->flow(), rot_from(guess), iterates, ctx->cfg.section, nopt);
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown orbit mode '" + m + "'");
    }
    *out = o.release();
  });
}

void ss_orbit_destroy(ss_orbit* o) { delete o; }

int ss_orbit_floquet(const ss_context* ctx, ss_orbit* o) {
  return guarded([&] {
    need(ctx, "ctx");
    need(o, "o");
    floquet_multipliers(ctx->flow(o->orbit.mu), o->orbit);
  });
}

int ss_orbit_get(const ss_orbit* o, ss_orbit_summary* out) {
  return guarded([&] {
    need(o, "o");
    need(out, "out");
    const PeriodicOrbit& p = o->orbit;
    copy_state(p.representative, out->representative);
    out->period = p.period;
    out->energy = p.energy;
    out->mu = p.mu;
    out->residual = p.residual;
    out->closure_error = p.closure_error;
    out->min_binding = p.min_binding;
    out->max_vertical = p.max_vertical;
    out->angular_momentum = p.angular_momentum;
    out->newton_iterations = static_cast<int>(p.newton_history.size()) - 1;
    out->floquet_count = static_cast<int>(p.floquet.size());
    out->floquet_reciprocal_residual = p.floquet_reciprocal;
    out->floquet_ill_conditioned = p.floquet_ill_conditioned;
    out->symmetry = symmetry_name(p.symmetry);
  });
}

int ss_orbit_floquet_values(const ss_orbit* o, double* re, double* im) {
  return guarded([&] {
    need(o, "o");
    for (size_t i = 0; i < o->orbit.floquet.size(); ++i) {
      if (re) re[i] = o->orbit.floquet[i].real();
      if (im) im[i] = o->orbit.floquet[i].imag();
    }
  });
}

int ss_orbit_write_json(const ss_context* ctx, const ss_orbit* o, const char* path) {
  return guarded([&] {
    need(ctx, "ctx");
    need(o, "o");
    need(path, "path");
    write_json_file(path, orbit_json(o->orbit), ctx->meta());
  });
}

int ss_continue(const ss_context* ctx, const ss_orbit* seed, const char* param, double step, int count,
                ss_family** out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(seed, "seed");
    need(param, "param");
    need(out, "out");
    *out = nullptr;
    ContinuationOptions co;
    const std::string p = param;
    if (p == "mu") {
      co.param = ContinuationParam::kMu;
    } else if (p == "c") {
      co.param = ContinuationParam::kEnergy;
    } else {
      fail(ErrorCode::kInvalidArgument, "continuation parameter must be 'mu' or 'c'");
    }
    co.step = step;
    co.count = count;
    auto f = std::make_unique<ss_family>();
    f->result = continue_family(seed->orbit, ctx->cfg.integrator, co);
    for (const PeriodicOrbit& m : f->result.members) f->members.push_back({m});
    *out = f.release();
  });
}

void ss_family_destroy(ss_family* f) { delete f; }
size_t ss_family_size(const ss_family* f) { return f ? f->members.size() : 0; }
int ss_family_complete(const ss_family* f) { return f ? f->result.complete : 0; }
int ss_family_stop_code(const ss_family* f) { return f ? static_cast<int>(f->result.stop_code) : SS_INVALID_ARGUMENT; }
const char* ss_family_stop_reason(const ss_family* f) { return f ? f->result.stop_reason.c_str() : ""; }

const ss_orbit* ss_family_member(const ss_family* f, size_t i) {
  if (!f || i >= f->members.size()) return nullptr;
  return &f->members[i];
}

int ss_family_write_json(const ss_context* ctx, const ss_family* f, const char* path) {
  return guarded([&] {
    need(ctx, "ctx");
    need(f, "f");
    need(path, "path");
    write_json_file(path, continuation_json(f->result), ctx->meta());
  });
}

int ss_verify(const ss_context* ctx, const char* suite, double tol, ss_report** out) {
  return guarded([&] {
    need(ctx, "ctx");
    need(out, "out");
    *out = nullptr;
    const std::string s = suite ? suite : "default";
    const double drift_tol = tol > 0.0 ? tol : 1e-9;
    auto rep = std::make_unique<ss_report>();
    rep->suite = s;
    const std::uint64_t seed = ctx->cfg.seed;
    if (s == "a3-fixture") {
      rep->checks.push_back(run_check("assumptions", 0.0, [&](Check& ch) {
        const AssumptionReport r = check_assumptions(a3_violation_fixture(), 1000, seed);
        ch.passed = r.ok();
        ch.value = r.witness_value;
        ch.detail = assumption_json(r);
      }));
    } else if (s == "default") {
      const MassRatio& mu = ctx->mu;
      const bool three_body = mu.value() > 0.0 && mu.value() < 1.0;
      rep->checks.push_back(run_check("chart_round_trips", 1e-12, [&](Check& ch) {
        const RoundTripReport r = chart_round_trips(10000, seed);
        ch.value = r.max();
        ch.passed = ch.value < ch.tolerance;
        ch.detail = {{"samples", r.samples}, {"chart", r.chart_error}, {"sphere", r.sphere_error},
                     {"identities", r.identity_error}, {"constraints", r.constraint_error}};
      }));
      rep->checks.push_back(run_check("kepler_oracles", 1e-8, [&](Check& ch) {
        const KeplerOracleReport r = kepler_oracles(10, seed);
        ch.value = std::max(r.planarity, r.period_spread);
        ch.passed = ch.value < ch.tolerance;
        ch.detail = {{"orbits", r.orbits}, {"planarity", r.planarity}, {"period_spread", r.period_spread},
                     {"mean_period", r.mean_period}};
      }));
      if (three_body) {
        const double c = ctx->energy();
        rep->checks.push_back(run_check("assumptions", 0.0, [&](Check& ch) {
          Json parts = Json::array();
          ch.passed = true;
          ch.value = std::numeric_limits<double>::infinity();
          for (Primary p : {Primary::kMoon, Primary::kEarth}) {
            const AssumptionReport r = check_assumptions(cr3bp_stark_zeeman(mu, c, p), 2000, seed, 0.5);
            ch.passed = ch.passed && r.ok();
            ch.value = std::min(ch.value, r.min_vertical_stiffness);
            Json pj = assumption_json(r);
            pj["primary"] = primary_name(p);
            parts.push_back(pj);
          }
          ch.detail = parts;
        }));
        rep->checks.push_back(run_check("transversality", 0.0, [&](Check& ch) {
          const TransversalitySampleReport r = transversality_sampling(mu, c, 10000, seed);
          ch.value = r.min_value;
          ch.passed = r.nonpositive == 0;
          ch.detail = {{"samples", r.samples}, {"nonpositive", r.nonpositive}, {"witness", rot_state_json(r.witness)}};
        }));
        rep->checks.push_back(run_check("energy_drift", drift_tol, [&](Check& ch) {
          const DriftReport r = energy_drift_study(mu, c, 10, 100.0, ctx->cfg.integrator, seed);
          ch.value = r.max_drift;
          ch.passed = ch.value < ch.tolerance;
          ch.detail = {{"orbits", r.orbits}, {"duration", r.duration}, {"drifts", r.drifts},
                       {"rel_tol", ctx->cfg.integrator.rel_tol}};
        }));
      }
    } else {
      fail(ErrorCode::kInvalidArgument, "unknown verification suite '" + s + "'");
    }
    *out = rep.release();
  });
}

void ss_report_destroy(ss_report* r) { delete r; }

int ss_report_passed(const ss_report* r) {
  if (!r) return 0;
  for (const Check& c : r->checks) {
    if (!c.passed) return 0;
  }
  return 1;
}

size_t ss_report_size(const ss_report* r) { return r ? r->checks.size() : 0; }

int ss_report_check(const ss_report* r, size_t i, const char** name, int* passed, double* value, double* tolerance) {
  return guarded([&] {
    need(r, "r");
    if (i >= r->checks.size()) fail(ErrorCode::kInvalidArgument, "check index out of range");
    const Check& c = r->checks[i];
    if (name) *name = c.name.c_str();
    if (passed) *passed = c.passed;
    if (value) *value = c.value;
    if (tolerance) *tolerance = c.tolerance;
  });
}

int ss_report_write_json(const ss_context* ctx, const ss_report* r, const char* path) {
  return guarded([&] {
    need(ctx, "ctx");
    need(r, "r");
    need(path, "path");
    Json checks = Json::array();
    for (const Check& c : r->checks) {
      checks.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"value", c.value},
                        {"tolerance", c.tolerance},
                        {"detail", c.detail}});
    }
    write_json_file(path, {{"suite", r->suite}, {"passed", ss_report_passed(r) == 1}, {"checks", checks}},
                    ctx->meta());
  });
}

}  // extern "C"
