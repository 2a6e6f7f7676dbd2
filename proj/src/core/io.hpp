#pragma once

#include "dynamics.hpp"
#include "flow.hpp"
#include "hill.hpp"
#include "orbits.hpp"
#include "return_map.hpp"
#include "verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sectionscope {

using Json = nlohmann::ordered_json;

const char* library_version();

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// %.17g
std::string format_double(double v);

struct RunConfig {
  double mu = kEarthMoonMu;
  std::optional<double> c;
  IntegratorConfig integrator;
  SectionSpec section;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
};

/// Strict: unknown keys, wrong types and out-of-range values throw kInvalidArgument.
RunConfig parse_run_config(const Json& j);
RunConfig parse_run_config_text(const std::string& text);

/// Canonical form: every field present, fixed key order.
Json run_config_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

AngleKind parse_angle_kind(const std::string& s);

/// Stamped into every output file.
struct OutputMeta {
  std::string config_hash;
  std::string command;
};

Json meta_json(const OutputMeta& m);

Json lagrange_json(const LagrangePointSet& lp, const MassRatio& mu);
Json hill_summary_json(const HillGrid& g, const MassRatio& mu);
Json orbit_json(const PeriodicOrbit& o);
Json continuation_json(const ContinuationResult& r);
Json rot_state_json(const RotState& s);

/// Writes `body` with a leading "meta" object, two-space indent, trailing newline.
void write_json(std::ostream& os, const Json& body, const OutputMeta& meta);
void write_json_file(const std::string& path, const Json& body, const OutputMeta& meta);

/// Comment lines start with '#'; the first carries version and config hash.
void write_csv_header(std::ostream& os, const OutputMeta& meta, const std::vector<std::string>& columns);
void write_hill_csv(std::ostream& os, const HillGrid& g, const OutputMeta& meta);
void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows, const OutputMeta& meta);

/// One record per sample: t, chart, state, H, constraint residual. The first
/// line is a meta record.
void write_trajectory_jsonl(std::ostream& os, const Trajectory& tr, const OutputMeta& meta);

/// Opens for writing or throws kIo.
std::ofstream open_output(const std::string& path);

}  // namespace sectionscope
