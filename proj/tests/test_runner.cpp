#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "branchlab/runner.hpp"
#include "branchlab/rng.hpp"

using namespace branchlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("branchlab_test_" + tag);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("derive_seed: stable golden vectors") {
  CHECK(derive_seed(0, 0) == 12035550249420947055ULL);
  CHECK(derive_seed(0, 1) == 6791897765849424158ULL);
  CHECK(derive_seed(42, 7) == 7974615062405353404ULL);
  CHECK(derive_seed(123456789, 1000000) == 18240540289733690985ULL);
}

TEST_CASE("derive_seed: no collisions over 10^6 indices") {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(2000000);
  for (std::uint64_t i = 0; i < 1000000; ++i)
    CHECK(seen.insert(derive_seed(7, i)).second);
}

TEST_CASE("rng: stable golden stream") {
  Rng r(42);
  CHECK(r.uniform() == doctest::Approx(0.13967200376411748).epsilon(1e-16));
  CHECK(r.uniform() == doctest::Approx(0.9693205787161252).epsilon(1e-16));
  CHECK(r.normal() == doctest::Approx(0.0020340498901775454).epsilon(1e-14));
}

TEST_CASE("parse_config: defaults, overrides, and field-path errors") {
  const ExperimentConfig cfg = parse_config("large-n", json::object());
  CHECK(cfg.experiment == "large-n");
  CHECK(cfg.master_seed == 1);
  CHECK(cfg.serial);

  const json doc = {{"experiment", "large-n"},
                    {"seed", 99},
                    {"format", "csv"},
                    {"params", {{"N", 100}, {"p", 0.5}}}};
  const ExperimentConfig full = parse_config("large-n", doc);
  CHECK(full.master_seed == 99);
  CHECK(full.format == OutputFormat::Csv);
  CHECK(full.params.at("N") == 100);

  CHECK_THROWS_WITH_AS(parse_config("large-n", {{"params", {{"bogus", 1}}}}),
                       "config error at params.bogus: unknown field", ConfigError);
  CHECK_THROWS_AS(parse_config("large-n", {{"seed", "not-a-number"}}), ConfigError);
  CHECK_THROWS_AS(parse_config("large-n", {{"experiment", "bohm"}}), ConfigError);
  CHECK_THROWS_AS(parse_config("large-n", {{"format", "xml"}}), ConfigError);
  CHECK_THROWS_AS(parse_config("no-such-experiment", json::object()), ConfigError);
}

TEST_CASE("run writes artifacts, manifest, and passing checks") {
  const fs::path out = temp_dir("finegrain");
  ExperimentConfig cfg = parse_config("finegrain", json::object());
  cfg.out_dir = out.string();
  const RunManifest m = run(cfg);
  CHECK(m.all_passed());
  CHECK(!m.checks.empty());
  CHECK(fs::exists(out / "manifest.json"));
  for (const auto& name : m.artifacts) CHECK(fs::exists(out / name));
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest.at("version") == kVersion);
  CHECK(manifest.at("checks").size() == m.checks.size());
  // every console-visible number appears in the manifest
  for (const auto& c : m.checks) {
    bool found = false;
    for (const auto& cj : manifest.at("checks"))
      if (cj.at("name") == c.name && cj.at("measured").get<double>() == c.measured)
        found = true;
    CHECK(found);
  }
  fs::remove_all(out);
}

TEST_CASE("serial reruns produce byte-identical artifacts") {
  const fs::path out1 = temp_dir("det1"), out2 = temp_dir("det2");
  json doc = {{"params", {{"N", 500}, {"p", 0.9}, {"runs", 500}}}, {"seed", 31}};
  ExperimentConfig c1 = parse_config("large-n", doc);
  ExperimentConfig c2 = parse_config("large-n", doc);
  c1.out_dir = out1.string();
  c2.out_dir = out2.string();
  run(c1);
  run(c2);
  CHECK(slurp(out1 / "distribution.csv") == slurp(out2 / "distribution.csv"));
  CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST_CASE("format flag controls which artifacts appear") {
  const fs::path out = temp_dir("fmt");
  ExperimentConfig cfg = parse_config("large-n", {{"params", {{"N", 50}, {"runs", 0}}}});
  cfg.out_dir = out.string();
  cfg.format = OutputFormat::Json;
  run(cfg);
  CHECK(!fs::exists(out / "distribution.csv"));
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "manifest.json"));
  fs::remove_all(out);
}

TEST_CASE("report_summary aggregates and sets the exit code") {
  json pass_manifest = {
      {"config", {{"experiment", "demo"}}},
      {"checks", json::array({{{"name", "a"}, {"pass", true}, {"measured", 1.0}}})}};
  json fail_manifest = {
      {"config", {{"experiment", "demo"}}},
      {"checks", json::array({{{"name", "b"}, {"pass", false}, {"measured", 0.5}}})}};

  const SummaryTable ok = report_summary({pass_manifest});
  CHECK(ok.exit_code == 0);
  CHECK(ok.table.find("a,pass") != std::string::npos);

  const SummaryTable bad = report_summary({pass_manifest, fail_manifest});
  CHECK(bad.exit_code == 1);
  CHECK(bad.table.find("b,FAIL") != std::string::npos);

  const SummaryTable empty = report_summary({});
  CHECK(empty.exit_code == 0);
  CHECK(!empty.warning.empty());
}

TEST_CASE("format_double round-trips doubles exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, -0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}
