// translab CLI: runs catalog experiments from declarative configs.
//
//   translab run <config.ini> [--set key=value ...] [--out dir] [--seed n]
//   translab list
//   translab describe <name>
//
// Exit codes: 0 all checks pass, 1 check failure, 2 usage or config error.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "translab/experiments.hpp"

namespace {

int cmd_list() {
  for (const auto& def : translab::exp::catalog())
    std::printf("%-20s %s\n", def.name.c_str(), def.summary.c_str());
  return 0;
}

int cmd_describe(const std::string& name) {
  const auto* def = translab::exp::find_experiment(name);
  if (def == nullptr) {
    std::fprintf(stderr, "unknown experiment: %s\n", name.c_str());
    return 2;
  }
  std::printf("%s\n\n%s\n\nParameters:\n", def->name.c_str(), def->description.c_str());
  for (const auto& p : def->params)
    std::printf("  %-18s (default %s)  %s\n", p.name.c_str(), p.default_value.c_str(),
                p.doc.c_str());
  return 0;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir, long long seed, bool seed_set) {
  auto cfg = translab::exp::load_config(config_path);
  for (const auto& assignment : overrides) translab::exp::apply_override(cfg, assignment);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed_set) cfg.seed = static_cast<std::uint64_t>(seed);

  const auto rec = translab::exp::run_experiment(cfg);
  for (const auto& check : rec.checks)
    std::printf("[%s] %-32s value=%.10g  %s\n", check.pass ? "PASS" : "FAIL", check.name.c_str(),
                check.value, check.detail.c_str());
  std::printf("%s: %zu/%zu checks passed in %.2f s\n", rec.experiment.c_str(),
              static_cast<std::size_t>(
                  std::count_if(rec.checks.begin(), rec.checks.end(),
                                [](const auto& c) { return c.pass; })),
              rec.checks.size(), rec.wall_seconds);
  if (!cfg.out_dir.empty()) std::printf("artifacts in %s\n", cfg.out_dir.c_str());
  return rec.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"translab: translocal network and wave dynamics experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  long long seed = 0;
  run->add_option("config", config_path, "Config file (INI-style)")->required();
  run->add_option("--set", overrides, "Override key=value or section.key=value");
  run->add_option("--out", out_dir, "Artifact output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Override the base seed");

  auto* list = app.add_subcommand("list", "List the experiment catalog");

  auto* describe = app.add_subcommand("describe", "Describe one experiment");
  std::string describe_name;
  describe->add_option("name", describe_name, "Experiment name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) return cmd_list();
    if (describe->parsed()) return cmd_describe(describe_name);
    return cmd_run(config_path, overrides, out_dir, seed, seed_opt->count() > 0);
  } catch (const translab::exp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
