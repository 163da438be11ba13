#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "branchlab/runner.hpp"

namespace {

using branchlab::ConfigError;
using branchlab::ExperimentConfig;
using branchlab::OutputFormat;
using nlohmann::json;

const std::vector<std::string> kExperiments = {"branch-demo", "born-derive", "large-n",
                                               "collapse",    "finegrain",   "bohm"};

json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
}

int run_experiment(const std::string& name, const std::string& config_path,
                   const std::optional<std::uint64_t>& seed, bool serial,
                   const std::string& out_dir, const std::string& format) {
  json doc = config_path.empty() ? json::object() : load_json(config_path);
  ExperimentConfig cfg = branchlab::parse_config(name, doc);
  if (seed) cfg.master_seed = *seed;
  if (serial) cfg.serial = true;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (!format.empty()) {
    if (format == "csv")
      cfg.format = OutputFormat::Csv;
    else if (format == "json")
      cfg.format = OutputFormat::Json;
    else if (format == "both")
      cfg.format = OutputFormat::Both;
    else
      throw ConfigError("config error at format: expected csv|json|both");
  }
  const branchlab::RunManifest manifest = branchlab::run(cfg);
  for (const auto& c : manifest.checks)
    std::cout << (c.pass ? "pass" : "FAIL") << "  " << c.name << "  measured "
              << branchlab::format_double(c.measured) << "  (" << c.tolerance << ")\n";
  std::cout << (manifest.all_passed() ? "all checks passed" : "some checks FAILED")
            << "; artifacts in " << cfg.out_dir << "\n";
  return manifest.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branchlab: numerical experiments on branching, probability laws, "
               "collapse linearity, and guided trajectories"};
  app.set_version_flag("--version", std::string("branchlab ") + branchlab::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir, format;
  std::optional<std::uint64_t> seed;
  bool serial = false;
  if (const char* env = std::getenv("BRANCHLAB_OUT")) out_dir = env;

  std::vector<CLI::App*> subs;
  for (const auto& name : kExperiments) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_flag("--serial", serial, "force serial execution");
    sub->add_option("--out", out_dir, "output directory (default: BRANCHLAB_OUT or .)");
    sub->add_option("--format", format, "artifact format: csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    subs.push_back(sub);
  }
  std::vector<std::string> manifest_paths;
  CLI::App* summary = app.add_subcommand("summary", "tabulate checks from manifest files");
  summary->add_option("manifests", manifest_paths, "manifest.json files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (summary->parsed()) {
      std::vector<json> manifests;
      for (const auto& p : manifest_paths) manifests.push_back(load_json(p));
      const branchlab::SummaryTable t = branchlab::report_summary(manifests);
      if (!t.warning.empty()) std::cerr << "warning: " << t.warning << "\n";
      std::cout << t.table;
      return t.exit_code;
    }
    for (std::size_t i = 0; i < kExperiments.size(); ++i)
      if (subs[i]->parsed())
        return run_experiment(kExperiments[i], config_path, seed, serial, out_dir, format);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
