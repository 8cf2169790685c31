// CSV input/output with a fixed column order and 17 significant digits, and
// the run manifest written next to every CLI output.
#pragma once

#include <string>
#include <vector>

#include "spdelab/config.hpp"
#include "spdelab/moduli.hpp"
#include "spdelab/sampler.hpp"

namespace spdelab {

std::string format_double(double v);

// Header row, then one row per entry of rows.
std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

// Header row = grid coordinates; one row per replica.
std::string paths_to_csv(const SamplePathSet& p);
SamplePathSet paths_from_csv(const std::string& text);

// Columns: delta, statistic, plateau, cv, H_hat, stderr.
std::string report_to_csv(const ModulusReport& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

struct ManifestEntry {
  std::string key;
  std::string value;
};

// JSON manifest: command line, configuration echo, seeds, library versions
// and the active SIMD kernel table.
std::string manifest_json(const RunConfig& cfg, const std::vector<std::string>& argv,
                          const std::vector<std::uint64_t>& seeds, const std::vector<ManifestEntry>& extra = {});

}  // namespace spdelab
