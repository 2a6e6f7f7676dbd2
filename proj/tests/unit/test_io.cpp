#include "error.hpp"
#include "io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace sectionscope;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Io, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Io, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(-2.0), "-2");
}

TEST(Io, ConfigDefaultsAndOverrides) {
  const RunConfig d = parse_run_config_text("{}");
  EXPECT_DOUBLE_EQ(d.mu, kEarthMoonMu);
  EXPECT_FALSE(d.c.has_value());
  const RunConfig c = parse_run_config_text(
      R"({"mu": 0.3, "c": -1.7, "seed": 9, "integrator": {"rel_tol": 1e-10, "switching": false},
          "section": {"angle": "physical", "page": 1.5}})");
  EXPECT_DOUBLE_EQ(c.mu, 0.3);
  EXPECT_DOUBLE_EQ(*c.c, -1.7);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_DOUBLE_EQ(c.integrator.rel_tol, 1e-10);
  EXPECT_FALSE(c.integrator.switching);
  EXPECT_DOUBLE_EQ(c.section.page, 1.5);
  // canonical form parses back to the same hash
  EXPECT_EQ(config_hash(parse_run_config(run_config_json(c))), config_hash(c));
  EXPECT_NE(config_hash(c), config_hash(d));
}

TEST(Io, ConfigIsStrict) {
  for (const char* bad : {R"({"mu": 0.1, "typo": 1})", R"({"integrator": {"rtol": 1e-9}})", R"({"mu": "x"})",
                          R"({"mu": 1.0})", R"({"section": {"angle": "spiral"}})", R"({"section": {"page": 7}})",
                          R"({"integrator": {"rel_tol": 0.5}})", R"({"seed": -1})", "{not json"}) {
    EXPECT_EQ(code_of([&] { parse_run_config_text(bad); }), ErrorCode::kInvalidArgument) << bad;
  }
}

TEST(Io, OutputsCarryHashAndVersion) {
  const OutputMeta meta{"0123456789abcdef", "sectionscope lagrange --mu 0.3"};
  const MassRatio mu(0.3);
  std::ostringstream js;
  write_json(js, lagrange_json(lagrange_points(mu), mu), meta);
  const Json j = Json::parse(js.str());
  EXPECT_EQ(j["meta"]["config_hash"], "0123456789abcdef");
  EXPECT_EQ(j["meta"]["version"], library_version());
  EXPECT_TRUE(j["ordering_ok"].get<bool>());
  EXPECT_EQ(j["points"].size(), 5u);

  std::ostringstream csv;
  write_scan_csv(csv, {ScanRow{}}, meta);
  EXPECT_NE(csv.str().find("config_hash=0123456789abcdef"), std::string::npos);
  EXPECT_EQ(count_lines(csv.str()), 4);  // two comments, header, one row
}

TEST(Io, TrajectoryJsonl) {
  const Cr3bpFlow flow(MassRatio(0.0), IntegratorConfig{});
  const Trajectory tr = flow.integrate({Vec3(0.5, 0, 0), Vec3(0, 0.5 * std::pow(0.5, -1.5), 0)}, 1.0);
  std::ostringstream os;
  write_trajectory_jsonl(os, tr, OutputMeta{"h", ""});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(Json::parse(line)["meta"]["config_hash"], "h");
  int n = 0;
  while (std::getline(is, line)) {
    const Json r = Json::parse(line);
    EXPECT_EQ(r["state"].size(), 6u);
    EXPECT_TRUE(r.contains("constraint_residual"));
    ++n;
  }
  EXPECT_EQ(n, static_cast<int>(tr.samples.size()));
}

TEST(Io, ByteStableOutput) {
  const MassRatio mu(0.2);
  auto render = [&] {
    std::ostringstream os;
    write_json(os, lagrange_json(lagrange_points(mu), mu), OutputMeta{"x", "y"});
    return os.str();
  };
  EXPECT_EQ(render(), render());
}
