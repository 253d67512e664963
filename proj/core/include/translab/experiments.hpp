#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "translab/graph.hpp"

namespace translab::exp {

// Configuration / usage problems map to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string experiment;
  std::uint64_t seed = 42;
  std::string out_dir;  // empty: no artifacts written
  std::map<std::string, std::string> params;
};

// INI-style: top-level `experiment`, `seed`, `out`; one [experiment-name]
// section with parameters. Unknown keys are rejected against the catalog.
Config load_config(const std::string& path);
Config parse_config_text(const std::string& text);
// Override `key=value` or `section.key=value` (section must match).
void apply_override(Config& cfg, const std::string& assignment);
// Fully explicit key/value echo; reloading it reproduces the run bit-exactly.
std::string echo_config(const Config& cfg);

enum class ParamType { integer, real, text };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::real;
  std::string default_value;
  std::string doc;
};

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string detail;
};

struct RunRecord {
  std::string experiment;
  std::map<std::string, std::string> effective_params;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;  // paths relative to out_dir
  double wall_seconds = 0.0;
  bool all_pass = false;
};

struct ExperimentDef {
  std::string name;
  std::string summary;
  std::string description;
  std::vector<ParamSpec> params;
  RunRecord (*run)(const Config&);
};

const std::vector<ExperimentDef>& catalog();
const ExperimentDef* find_experiment(const std::string& name);

// Validates, fills defaults, runs, and (when out_dir is set) writes the
// artifact files, the config echo and run_record.json.
RunRecord run_experiment(const Config& cfg);

// Reference maximal-clique enumeration by exhaustive subset scan; the
// independent oracle for the pivoting enumerator (n <= 20 or so).
std::vector<graph::Clique> brute_force_max_cliques(const graph::Graph& g, int min_size);

}  // namespace translab::exp
