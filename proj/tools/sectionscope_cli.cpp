// Command-line front end. Talks to the library only through the C API.
#include "sectionscope/sectionscope.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

enum Exit { kExitOk = 0, kExitConfig = 1, kExitVerification = 2, kExitNumerical = 3 };

int exit_for(int status) {
  switch (status) {
    case SS_OK: return kExitOk;
    case SS_INVALID_ARGUMENT:
    case SS_IO: return kExitConfig;
    case SS_ASSUMPTION_VIOLATION: return kExitVerification;
    default: return kExitNumerical;
  }
}

// Thrown to unwind with an exit code after printing the library message.
struct Failure {
  int code;
};

void check(int status, const char* what) {
  if (status == SS_OK) return;
  std::cerr << "sectionscope: " << what << " failed (" << ss_status_name(status) << "): " << ss_last_error() << '\n';
  throw Failure{exit_for(status)};
}

template <class T, void (*Del)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Del(p); }
};

struct Common {
  std::string config_file;
  std::optional<double> mu, c, tol;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string mode;
};

void add_common(CLI::App* app, Common& o) {
  app->add_option("--config", o.config_file, "RunConfig JSON file (strict schema)")->check(CLI::ExistingFile);
  app->add_option("--mu", o.mu, "mass ratio, Moon over total");
  app->add_option("--c", o.c, "energy level H = c");
  app->add_option("--seed", o.seed, "random seed");
  app->add_option("--out", o.out, "output directory");
}

std::string config_text(const Common& o) {
  Json j = Json::object();
  if (!o.config_file.empty()) {
    std::ifstream is(o.config_file);
    std::stringstream ss;
    ss << is.rdbuf();
    try {
      j = Json::parse(ss.str());
    } catch (const Json::exception& e) {
      std::cerr << "sectionscope: config: " << o.config_file << " is not valid JSON: " << e.what() << '\n';
      throw Failure{kExitConfig};
    }
    if (!j.is_object()) {
      std::cerr << "sectionscope: config: top level must be an object\n";
      throw Failure{kExitConfig};
    }
  }
  if (o.mu) j["mu"] = *o.mu;
  if (o.c) j["c"] = *o.c;
  if (o.seed) j["seed"] = *o.seed;
  if (!o.out.empty()) j["output_dir"] = o.out;
  return j.dump();
}

struct Context {
  ss_context* ctx = nullptr;
  std::filesystem::path dir;
  ~Context() { ss_context_destroy(ctx); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

void open_context(Context& c, const Common& o, const std::string& command_line, const std::string& extra = "") {
  std::string text = config_text(o);
  if (!extra.empty()) {
    Json j = Json::parse(text);
    const Json add = Json::parse(extra);
    for (const auto& [k, v] : add.items()) j[k] = v;
    text = j.dump();
  }
  check(ss_context_create(text.c_str(), command_line.c_str(), &c.ctx), "configuration");
  c.dir = Json::parse(ss_context_config_json(c.ctx))["output_dir"].get<std::string>();
  std::error_code ec;
  std::filesystem::create_directories(c.dir, ec);
  if (ec) {
    std::cerr << "sectionscope: cannot create output directory " << c.dir << ": " << ec.message() << '\n';
    throw Failure{kExitConfig};
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_orbit(const ss_orbit* o, const char* label) {
  ss_orbit_summary s;
  check(ss_orbit_get(o, &s), "orbit summary");
  std::cout << label << ": symmetry " << s.symmetry << ", period " << fmt(s.period) << ", residual " << s.residual
            << ", closure " << s.closure_error << ", newton iterations " << s.newton_iterations;
  if (s.floquet_count > 0) std::cout << ", floquet reciprocal residual " << s.floquet_reciprocal_residual;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  // argv[0] is left out so outputs do not depend on the install path
  std::string command_line = "sectionscope";
  for (int i = 1; i < argc; ++i) command_line += " " + std::string(argv[i]);

  CLI::App app{"sectionscope: open-book return maps and periodic orbits of the restricted three-body problem"};
  app.set_version_flag("--version", std::string(ss_version()));
  app.require_subcommand(1);

  Common o;
  int n = 1000, grid = 256, iterates = 1, count = 10;
  std::vector<double> pages, guess, state;
  double duration = 10.0, step = 1e-3, delta = 1e-3, a = 1.0, b = 2.0;
  std::string primary = "moon", param = "mu";
  bool jacobians = false, no_floquet = false;

  auto* lag = app.add_subcommand("lagrange", "Lagrange points and the energy ordering check");
  add_common(lag, o);

  auto* hill = app.add_subcommand("hill", "Hill region grid and its connected components");
  add_common(hill, o);
  hill->add_option("--grid", grid, "cells per axis")->check(CLI::Range(2, 4096));
  hill->add_option("--mode", o.mode, "planar or spatial")->check(CLI::IsMember({"planar", "spatial"}));

  auto* integ = app.add_subcommand("integrate", "integrate one orbit and write JSONL samples");
  add_common(integ, o);
  integ->add_option("--state", state, "q1,q2,q3,p1,p2,p3 (rotating frame)")->delimiter(',')->required()->expected(6);
  integ->add_option("--duration", duration, "physical time");
  integ->add_option("--tol", o.tol, "fail with exit 2 when the relative energy drift exceeds this");

  auto* scan = app.add_subcommand("section-scan", "return-map samples on one or more pages");
  add_common(scan, o);
  scan->add_option("--n", n, "points per page")->check(CLI::PositiveNumber);
  scan->add_option("--pages", pages, "page angles in [0, 2 pi)")->delimiter(',');
  scan->add_option("--mode", o.mode, "cr3bp or ellipsoid")->check(CLI::IsMember({"cr3bp", "ellipsoid"}));
  scan->add_option("--primary", primary, "earth or moon")->check(CLI::IsMember({"earth", "moon"}));
  scan->add_flag("--jacobians", jacobians, "finite-difference Jacobians and symplecticity residuals");
  scan->add_option("--tol", delta, "leaf-label recurrence threshold");
  scan->add_option("--a", a, "ellipsoid a");
  scan->add_option("--b", b, "ellipsoid b");

  auto* find = app.add_subcommand("find-orbit", "periodic orbit search");
  add_common(find, o);
  find->add_option("--mode", o.mode, "vertical-collision, retrograde, direct or page")
      ->required()
      ->check(CLI::IsMember({"vertical-collision", "retrograde", "direct", "page"}));
  find->add_option("--pages", pages, "page angle for page mode")->delimiter(',');
  find->add_option("--guess", guess, "q1 (retrograde/direct) or six components (page)")->delimiter(',');
  find->add_option("--k", iterates, "return-map iterates (page mode)");
  find->add_option("--tol", o.tol, "Newton residual tolerance");
  find->add_flag("--no-floquet", no_floquet, "skip Floquet multipliers");

  auto* cont = app.add_subcommand("continue", "natural-parameter continuation of an orbit family");
  add_common(cont, o);
  cont->add_option("--mode", o.mode, "seed: vertical-collision, retrograde or direct")
      ->required()
      ->check(CLI::IsMember({"vertical-collision", "retrograde", "direct"}));
  cont->add_option("--param", param, "mu or c")->check(CLI::IsMember({"mu", "c"}));
  cont->add_option("--step", step, "parameter step");
  cont->add_option("--n", count, "number of steps");
  cont->add_option("--guess", guess, "q1 for retrograde/direct seeds")->delimiter(',');
  cont->add_option("--tol", o.tol, "Newton residual tolerance for the seed");

  auto* ver = app.add_subcommand("verify", "invariant suites: charts, Kepler oracles, assumptions, drift");
  add_common(ver, o);
  ver->add_option("--mode", o.mode, "default or a3-fixture")->check(CLI::IsMember({"default", "a3-fixture"}));
  ver->add_option("--tol", o.tol, "relative energy drift threshold over 100 time units");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    Context ctx;
    if (lag->parsed()) {
      open_context(ctx, o, command_line);
      int ok = 0;
      check(ss_lagrange_write(ctx.ctx, ctx.path("lagrange.json").c_str(), &ok), "lagrange");
      std::cout << "wrote " << ctx.path("lagrange.json") << "; ordering " << (ok ? "ok" : "VIOLATED") << '\n';
      return ok ? kExitOk : kExitVerification;
    }

    if (hill->parsed()) {
      open_context(ctx, o, command_line);
      Handle<ss_hill, ss_hill_destroy> h;
      check(ss_hill_compute(ctx.ctx, grid, o.mode != "spatial", &h.p), "hill");
      check(ss_hill_write(h.p, ctx.path("hill.csv").c_str(), ctx.path("hill_components.json").c_str()), "hill output");
      std::cout << "components " << ss_hill_components(h.p) << " (bounded " << ss_hill_bounded_components(h.p)
                << ")\n";
      if (ss_hill_resolution_warning(h.p)) {
        std::cerr << "warning: component count changes when the grid is doubled; the grid is too coarse\n";
      }
      return kExitOk;
    }

    if (integ->parsed()) {
      open_context(ctx, o, command_line);
      Handle<ss_trajectory, ss_trajectory_destroy> t;
      check(ss_integrate(ctx.ctx, state.data(), duration, &t.p), "integrate");
      check(ss_trajectory_write_jsonl(t.p, ctx.path("trajectory.jsonl").c_str()), "trajectory output");
      const double drift = ss_trajectory_energy_drift(t.p);
      std::cout << "samples " << ss_trajectory_size(t.p) << ", chart switches " << ss_trajectory_chart_switches(t.p)
                << ", energy drift " << drift << '\n';
      if (o.tol && !(drift <= *o.tol)) {
        std::cerr << "energy drift " << drift << " exceeds " << *o.tol << '\n';
        return kExitVerification;
      }
      return kExitOk;
    }

    if (scan->parsed()) {
      if (pages.empty()) pages.push_back(0.0);
      if (o.mode == "ellipsoid") {
        const double predicted = std::remainder(2 * M_PI * a / b, 2 * M_PI);
        int worst_exit = kExitOk;
        for (std::size_t k = 0; k < pages.size(); ++k) {
          Context pc;
          open_context(pc, o, command_line, Json{{"section", {{"angle", "ellipsoid"}, {"page", pages[k]}}}}.dump());
          double err = 0.0;
          const std::string file = pc.path(pages.size() == 1 ? "ellipsoid_scan.csv"
                                                             : "ellipsoid_scan_page" + std::to_string(k) + ".csv");
          check(ss_ellipsoid_scan(pc.ctx, a, b, n, file.c_str(), &err), "ellipsoid scan");
          std::cout << "page " << fmt(pages[k]) << ": rotation " << fmt(predicted) << " predicted, max error " << err
                    << '\n';
          if (!(err < 1e-8)) worst_exit = kExitVerification;
        }
        return worst_exit;
      }
      for (std::size_t k = 0; k < pages.size(); ++k) {
        Context pc;
        open_context(pc, o, command_line, Json{{"section", {{"angle", "physical"}, {"page", pages[k]}}}}.dump());
        Handle<ss_scan, ss_scan_destroy> s;
        check(ss_section_scan(pc.ctx, n, primary == "moon" ? 1 : 0, jacobians, &s.p), "section scan");
        const std::string file = pc.path(pages.size() == 1 ? "scan.csv" : "scan_page" + std::to_string(k) + ".csv");
        check(ss_scan_write_csv(s.p, file.c_str()), "scan output");
        std::size_t failed = 0, warned = 0;
        double max_sympl = 0.0;
        for (std::size_t i = 0; i < ss_scan_size(s.p); ++i) {
          ss_scan_row row;
          check(ss_scan_row_get(s.p, i, &row), "scan row");
          failed += row.error != SS_OK;
          warned += row.binding_warning != 0;
          if (row.error == SS_OK && !std::isnan(row.symplecticity)) max_sympl = std::max(max_sympl, row.symplecticity);
        }
        std::cout << "page " << fmt(pages[k]) << ": " << ss_scan_size(s.p) << " points, " << failed << " failed, "
                  << warned << " near the binding, " << ss_scan_recurrent(s.p, delta)
                  << " with leaf delta < " << delta;
        if (jacobians) std::cout << ", max symplecticity residual " << max_sympl;
        std::cout << " -> " << file << '\n';
      }
      return kExitOk;
    }

    if (find->parsed()) {
      std::string extra;
      if (!pages.empty()) extra = Json{{"section", {{"angle", "physical"}, {"page", pages.front()}}}}.dump();
      open_context(ctx, o, command_line, extra);
      if (o.mode == "page" && guess.size() != 6) {
        std::cerr << "sectionscope: page mode needs --guess with six components\n";
        return kExitConfig;
      }
      Handle<ss_orbit, ss_orbit_destroy> orb;
      check(ss_find_orbit(ctx.ctx, o.mode.c_str(), guess.empty() ? nullptr : guess.data(), iterates,
                          o.tol.value_or(0.0), &orb.p),
            "orbit search");
      int rc = kExitOk;
      if (!no_floquet) {
        const int st = ss_orbit_floquet(ctx.ctx, orb.p);
        if (st != SS_OK) {
          std::cerr << "warning: Floquet analysis failed (" << ss_status_name(st) << "): " << ss_last_error() << '\n';
          rc = exit_for(st);
        }
      }
      check(ss_orbit_write_json(ctx.ctx, orb.p, ctx.path("orbit.json").c_str()), "orbit output");
      print_orbit(orb.p, "orbit");
      ss_orbit_summary s;
      check(ss_orbit_get(orb.p, &s), "orbit summary");
      if (s.floquet_ill_conditioned) std::cerr << "warning: monodromy is ill-conditioned\n";
      return rc;
    }

    if (cont->parsed()) {
      open_context(ctx, o, command_line);
      Handle<ss_orbit, ss_orbit_destroy> seed;
      check(ss_find_orbit(ctx.ctx, o.mode.c_str(), guess.empty() ? nullptr : guess.data(), 1, o.tol.value_or(0.0),
                          &seed.p),
            "seed search");
      Handle<ss_family, ss_family_destroy> fam;
      check(ss_continue(ctx.ctx, seed.p, param.c_str(), step, count, &fam.p), "continuation");
      check(ss_family_write_json(ctx.ctx, fam.p, ctx.path("family.json").c_str()), "family output");
      std::cout << "members " << ss_family_size(fam.p) << (ss_family_complete(fam.p) ? ", complete" : "") << '\n';
      if (!ss_family_complete(fam.p)) {
        std::cerr << "continuation stopped (" << ss_status_name(ss_family_stop_code(fam.p))
                  << "): " << ss_family_stop_reason(fam.p) << '\n';
        return kExitNumerical;
      }
      return kExitOk;
    }

    if (ver->parsed()) {
      open_context(ctx, o, command_line);
      Handle<ss_report, ss_report_destroy> r;
      const std::string suite = o.mode.empty() ? "default" : o.mode;
      check(ss_verify(ctx.ctx, suite.c_str(), o.tol.value_or(0.0), &r.p), "verify");
      check(ss_report_write_json(ctx.ctx, r.p, ctx.path("verify.json").c_str()), "report output");
      for (std::size_t i = 0; i < ss_report_size(r.p); ++i) {
        const char* name = nullptr;
        int passed = 0;
        double value = 0.0, tol = 0.0;
        check(ss_report_check(r.p, i, &name, &passed, &value, &tol), "report");
        std::cout << (passed ? "PASS " : "FAIL ") << name << " value " << value << " tolerance " << tol << '\n';
      }
      return ss_report_passed(r.p) ? kExitOk : kExitVerification;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitOk;
}
