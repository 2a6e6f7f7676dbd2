#include "io.hpp"

#include "error.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace sectionscope {

const char* library_version() { return SECTIONSCOPE_VERSION; }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

AngleKind parse_angle_kind(const std::string& s) {
  for (AngleKind k : {AngleKind::kPhysical, AngleKind::kGeodesic, AngleKind::kEllipsoid}) {
    if (s == angle_kind_name(k)) return k;
  }
  fail(ErrorCode::kInvalidArgument, "unknown section angle '" + s + "'");
}

namespace {

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::kInvalidArgument, "config: " + what); }

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) config_error("unknown key '" + where + k + "'");
  }
}

double number(const Json& j, const std::string& key) {
  if (!j.is_number()) config_error("'" + key + "' must be a number");
  return j.get<double>();
}

}  // namespace

RunConfig parse_run_config(const Json& j) {
  reject_unknown(j, {"mu", "c", "integrator", "section", "seed", "output_dir"}, "");
  RunConfig cfg;
  if (j.contains("mu")) cfg.mu = number(j["mu"], "mu");
  if (!(cfg.mu >= 0.0 && cfg.mu < 1.0)) config_error("mu must lie in [0, 1)");
  if (j.contains("c")) {
    cfg.c = number(j["c"], "c");
    if (!std::isfinite(*cfg.c)) config_error("c must be finite");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) config_error("'seed' must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) config_error("'output_dir' must be a string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  if (j.contains("integrator")) {
    const Json& ij = j["integrator"];
    reject_unknown(ij, {"rel_tol", "abs_tol", "max_step", "collision_switch_radius", "max_time", "switching"},
                   "integrator.");
    IntegratorConfig& ic = cfg.integrator;
    if (ij.contains("rel_tol")) ic.rel_tol = number(ij["rel_tol"], "integrator.rel_tol");
    if (ij.contains("abs_tol")) ic.abs_tol = number(ij["abs_tol"], "integrator.abs_tol");
    if (ij.contains("max_step")) ic.max_step = number(ij["max_step"], "integrator.max_step");
    if (ij.contains("collision_switch_radius")) {
      ic.collision_switch_radius = number(ij["collision_switch_radius"], "integrator.collision_switch_radius");
    }
    if (ij.contains("max_time")) ic.max_time = number(ij["max_time"], "integrator.max_time");
    if (ij.contains("switching")) {
      if (!ij["switching"].is_boolean()) config_error("'integrator.switching' must be a boolean");
      ic.switching = ij["switching"].get<bool>();
    }
    try {
      ic.validate();
    } catch (const Error& e) {
      config_error(std::string("integrator: ") + e.what());
    }
  }
  if (j.contains("section")) {
    const Json& sj = j["section"];
    reject_unknown(sj, {"angle", "page"}, "section.");
    if (sj.contains("angle")) {
      if (!sj["angle"].is_string()) config_error("'section.angle' must be a string");
      cfg.section.kind = parse_angle_kind(sj["angle"].get<std::string>());
    }
    if (sj.contains("page")) {
      const double p = number(sj["page"], "section.page");
      if (!(p >= 0.0 && p < kTwoPi)) config_error("section.page must lie in [0, 2 pi)");
      cfg.section.page = p;
    }
  }
  return cfg;
}

RunConfig parse_run_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    config_error(std::string("not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

Json run_config_json(const RunConfig& cfg) {
  Json j;
  j["mu"] = cfg.mu;
  j["c"] = cfg.c ? Json(*cfg.c) : Json(nullptr);
  const IntegratorConfig& ic = cfg.integrator;
  j["integrator"] = {{"rel_tol", ic.rel_tol},
                     {"abs_tol", ic.abs_tol},
                     {"max_step", ic.max_step},
                     {"collision_switch_radius", ic.collision_switch_radius},
                     {"max_time", ic.max_time},
                     {"switching", ic.switching}};
  j["section"] = {{"angle", angle_kind_name(cfg.section.kind)}, {"page", cfg.section.page}};
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  return j;
}

std::string config_hash(const RunConfig& cfg) { return fnv1a_hex(run_config_json(cfg).dump()); }

Json meta_json(const OutputMeta& m) {
  return {{"library", "sectionscope"}, {"version", library_version()}, {"config_hash", m.config_hash},
          {"command", m.command}};
}

Json rot_state_json(const RotState& s) {
  Json a = Json::array();
  for (int i = 0; i < 6; ++i) a.push_back(s.packed()[i]);
  return a;
}

Json lagrange_json(const LagrangePointSet& lp, const MassRatio& mu) {
  Json pts = Json::array();
  for (int i = 0; i < 5; ++i) {
    pts.push_back({{"name", "L" + std::to_string(i + 1)},
                   {"q", {lp.points[i].x(), lp.points[i].y(), lp.points[i].z()}},
                   {"energy", lp.energies[i]},
                   {"gradient_norm", lp.gradient_norms[i]}});
  }
  return {{"mu", mu.value()}, {"points", pts}, {"ordering_ok", lp.ordering_ok()}};
}

Json hill_summary_json(const HillGrid& g, const MassRatio& mu) {
  Json comps = Json::array();
  for (int i = 0; i < g.components; ++i) {
    comps.push_back({{"id", i}, {"cells", g.component_sizes[i]}, {"bounded", !g.unbounded[i]}});
  }
  Json j = {{"mu", mu.value()},
            {"c", g.c},
            {"resolution", g.resolution},
            {"planar", g.planar},
            {"box", {{"lo", {g.box.lo.x(), g.box.lo.y(), g.box.lo.z()}}, {"hi", {g.box.hi.x(), g.box.hi.y(), g.box.hi.z()}}}},
            {"components", g.components},
            {"bounded_components", g.bounded_count()},
            {"component_list", comps},
            {"resolution_checked", g.resolution_checked},
            {"resolution_warning", g.resolution_warning}};
  if (g.resolution_checked) j["components_at_double_resolution"] = g.components_at_double;
  return j;
}

Json orbit_json(const PeriodicOrbit& o) {
  Json fl = Json::array();
  for (const auto& l : o.floquet) fl.push_back({l.real(), l.imag()});
  Json hist = Json::array();
  for (double h : o.newton_history) hist.push_back(h);
  Json j = {{"representative", rot_state_json(o.representative)},
            {"form", o.page_form ? "page" : "full"},
            {"period", o.period},
            {"energy", o.energy},
            {"mu", o.mu},
            {"primary", primary_name(o.primary)},
            {"symmetry", symmetry_name(o.symmetry)},
            {"residual", o.residual},
            {"closure_error", o.closure_error},
            {"min_binding", o.min_binding},
            {"max_vertical", o.max_vertical},
            {"angular_momentum", o.angular_momentum},
            {"direction", o.angular_momentum < 0.0 ? "retrograde" : "direct"},
            {"newton_history", hist},
            {"floquet", fl},
            {"floquet_reciprocal_residual", o.floquet_reciprocal},
            {"floquet_ill_conditioned", o.floquet_ill_conditioned}};
  if (o.page_form) {
    j["section"] = {{"angle", angle_kind_name(o.section.kind)}, {"page", o.section.page}};
    j["iterates"] = o.iterates;
  }
  return j;
}

Json continuation_json(const ContinuationResult& r) {
  Json m = Json::array();
  for (const PeriodicOrbit& o : r.members) m.push_back(orbit_json(o));
  return {{"complete", r.complete},
          {"stop_code", error_code_name(r.stop_code)},
          {"stop_reason", r.stop_reason},
          {"count", r.members.size()},
          {"members", m}};
}

void write_json(std::ostream& os, const Json& body, const OutputMeta& meta) {
  Json j;
  j["meta"] = meta_json(meta);
  for (const auto& [k, v] : body.items()) j[k] = v;
  os << j.dump(2) << '\n';
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  return os;
}

void write_json_file(const std::string& path, const Json& body, const OutputMeta& meta) {
  std::ofstream os = open_output(path);
  write_json(os, body, meta);
  if (!os) fail(ErrorCode::kIo, "write to '" + path + "' failed");
}

void write_csv_header(std::ostream& os, const OutputMeta& meta, const std::vector<std::string>& columns) {
  os << "# sectionscope " << library_version() << " config_hash=" << meta.config_hash << '\n';
  if (!meta.command.empty()) os << "# command: " << meta.command << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
}

void write_hill_csv(std::ostream& os, const HillGrid& g, const OutputMeta& meta) {
  std::vector<std::string> cols = {"q1", "q2"};
  if (!g.planar) cols.push_back("q3");
  for (const char* c : {"U", "inside", "component"}) cols.push_back(c);
  write_csv_header(os, meta, cols);
  const int n = g.resolution;
  const int nk = g.planar ? 1 : n;
  for (int k = 0; k < nk; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec3 q = g.cell_center(i, j, k);
        const std::size_t idx = g.index(i, j, k);
        os << format_double(q.x()) << ',' << format_double(q.y()) << ',';
        if (!g.planar) os << format_double(q.z()) << ',';
        os << format_double(g.potential[idx]) << ',' << int(g.inside[idx]) << ',' << g.labels[idx] << '\n';
      }
    }
  }
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows, const OutputMeta& meta) {
  std::vector<std::string> cols = {"index"};
  for (const char* n : {"x_q1", "x_q2", "x_q3", "x_p1", "x_p2", "x_p3", "fx_q1", "fx_q2", "fx_q3", "fx_p1", "fx_p2",
                        "fx_p3", "tau", "H", "energy_error", "symplecticity", "leaf_delta", "min_binding",
                        "binding_warning", "error"}) {
    cols.push_back(n);
  }
  write_csv_header(os, meta, cols);
  for (const ScanRow& r : rows) {
    os << r.index;
    for (int i = 0; i < 6; ++i) os << ',' << format_double(r.x.packed()[i]);
    for (int i = 0; i < 6; ++i) os << ',' << format_double(r.fx.packed()[i]);
    for (double v : {r.tau, r.energy, r.energy_error, r.symplecticity, r.leaf_delta, r.min_binding}) {
      os << ',' << format_double(v);
    }
    os << ',' << int(r.binding_warning) << ',' << r.error << '\n';
  }
}

void write_trajectory_jsonl(std::ostream& os, const Trajectory& tr, const OutputMeta& meta) {
  Json head;
  head["meta"] = meta_json(meta);
  head["energy"] = tr.energy;
  head["energy_drift"] = tr.energy_drift;
  head["chart_switches"] = tr.chart_switches;
  head["samples"] = tr.samples.size();
  os << head.dump() << '\n';
  for (const TrajectorySample& s : tr.samples) {
    Json st = Json::array();
    for (Eigen::Index i = 0; i < s.state.size(); ++i) st.push_back(s.state[i]);
    Json rec;
    rec["t"] = s.t;
    rec["chart"] = chart_name(s.chart);
    rec["state"] = st;
    rec["H"] = s.energy;
    rec["constraint_residual"] = s.constraint_residual;
    os << rec.dump() << '\n';
  }
}

}  // namespace sectionscope
