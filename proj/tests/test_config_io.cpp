#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "levylab/assumptions.hpp"
#include "levylab/config.hpp"
#include "levylab/io.hpp"

using namespace levylab;

namespace {

const char* kExampleConfig = R"(
# example-family kernel
[kernel]
dim = 1
preset = example
epsilon = 0.5

[paths]
n = 8
horizon = 2
count = 100

[run]
seed = 77
)";

}  // namespace

TEST_CASE("ini parsing: sections, comments, trimming") {
  const IniConfig cfg = IniConfig::parse_string(kExampleConfig);
  CHECK(cfg.get("kernel", "preset", "") == "example");
  CHECK(cfg.get_int("paths", "n", 0) == 8);
  CHECK(cfg.get_u64("run", "seed", 0) == 77);
  CHECK(cfg.get("missing", "key", "fallback") == "fallback");
  CHECK_FALSE(cfg.has("kernel", "absent"));
}

TEST_CASE("ini parsing: diagnostics name the offending line") {
  try {
    IniConfig::parse_string("[kernel]\npreset example\n", "bad.ini");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.ini:2") != std::string::npos);
  }
  CHECK_THROWS_AS(IniConfig::parse_string("key = 1\n"), config_error);
  CHECK_THROWS_AS(IniConfig::parse_string("[sec\nk = 1\n"), config_error);

  const IniConfig cfg = IniConfig::parse_string("[a]\nx = abc\n");
  CHECK_THROWS_AS(cfg.get_double("a", "x", 0.0), config_error);
}

TEST_CASE("canonical hash: stable, order-insensitive, value-sensitive") {
  const IniConfig a =
      IniConfig::parse_string("[b]\ny = 2\n[a]\nx = 1\n");
  const IniConfig b =
      IniConfig::parse_string("[a]\nx = 1\n[b]\ny = 2\n");
  CHECK(a.hash_hex() == b.hash_hex());
  IniConfig c = a;
  c.set("a", "x", "3");
  CHECK(c.hash_hex() != a.hash_hex());
  CHECK(a.hash_hex().size() == 16);
}

TEST_CASE("kernel assembly from config") {
  const IniConfig cfg = IniConfig::parse_string(kExampleConfig);
  const StateKernel k = build_kernel(cfg);
  CHECK(k.dim() == 1);
  CHECK(k.A.family_tag == "example");
  CHECK(k.j_script_finite);

  const IniConfig custom = IniConfig::parse_string(R"(
[kernel]
dim = 1
[profile]
type = log
[perturbation]
family = sigmoid
c1 = 0.5
c2 = 2.0
[modulus]
type = reciprocal
eps = 0.25
)");
  const StateKernel kc = build_kernel(custom);
  CHECK(kc.A.family_tag == "sigmoid");
  CHECK(kc.A.c2 == 2.0);

  const IniConfig bad = IniConfig::parse_string("[kernel]\npreset = nope\n");
  CHECK_THROWS_AS(build_kernel(bad), config_error);
}

TEST_CASE("path config validation") {
  IniConfig cfg = IniConfig::parse_string(kExampleConfig);
  const PathConfig pc = build_path_config(cfg);
  CHECK(pc.n == 8);
  CHECK(pc.steps() == 512);
  cfg.set("paths", "horizon", "0.3");  // not a multiple of 2^-8
  CHECK_THROWS_AS(build_path_config(cfg), config_error);
  cfg.set("paths", "horizon", "2");
  cfg.set("paths", "eps_cut", "1.5");
  CHECK_THROWS_AS(build_path_config(cfg), config_error);
}

TEST_CASE("assumption report serializes with fixed field names") {
  const AssumptionReport report =
      validate_assumptions(make_preset_kernel("gs-like", 1));
  const Json j = to_json(report);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["all_pass"] == true);
  REQUIRE(j.contains("clauses"));
  for (const auto& clause : j["clauses"]) {
    CHECK(clause.contains("clause"));
    CHECK(clause.contains("verdict"));
    CHECK(clause.contains("value"));
    CHECK(clause.contains("error_estimate"));
  }
  CHECK(j.contains("K0"));
  CHECK(j.contains("J_script"));
  CHECK(j.contains("delta_table"));
  // serialization is deterministic
  CHECK(j.dump() == to_json(report).dump());
}

TEST_CASE("csv writer format") {
  const std::string path = "/tmp/levylab_csv_test.csv";
  {
    CsvWriter csv(path, {"a", "b"});
    csv.row({1.5, -2.25e-7});
    csv.row({0.1, 3.0});
  }
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  CHECK(content.find("a,b\n") == 0);
  CHECK(content.find("1.5,") != std::string::npos);
  CHECK(content.find("0.10000000000000001,3\n") != std::string::npos);
  std::remove(path.c_str());
}
