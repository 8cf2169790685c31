// Run configuration: a JSON document with strict validation. Unknown keys,
// duplicate keys and out-of-range values are rejected with the key path.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spdelab/kernels.hpp"

namespace spdelab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  double start = 0.0;
  double spacing = 0.0;
  std::size_t points = 0;
};

struct RunConfig {
  std::string command = "verify";
  ModelParams params{};
  double t = 1.0;
  std::map<std::string, GridSpec> grids;  // "time", "space"
  std::vector<std::uint64_t> seeds{20261016};
  std::size_t replicas = 64;
  std::map<std::string, double> tolerances;  // every known name, defaults filled
  std::string output_dir = "out";
  std::vector<std::string> only;
  double perturb_constant = 0.0;  // relative perturbation of a reference constant (failure fixture)
};

RunConfig default_config();
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Canonical JSON echo: sorted keys, shortest round-trip numbers.
std::string config_to_json(const RunConfig& cfg);

Family parse_family(const std::string& s);
std::string family_name(Family f);

}  // namespace spdelab
