#include "spdelab/csv.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spdelab/simd.hpp"
#include "spdelab/specfun.hpp"
#include "spdelab/version.hpp"

namespace spdelab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw DomainError("to_csv: row width differs from the header");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += format_double(r[i]);
    }
    out += '\n';
  }
  return out;
}

std::string paths_to_csv(const SamplePathSet& p) {
  std::string out;
  out.reserve((p.replicas + 1) * p.points() * 24);
  for (std::size_t i = 0; i < p.points(); ++i) {
    if (i) out += ',';
    out += format_double(p.grid[i]);
  }
  out += '\n';
  for (std::size_t r = 0; r < p.replicas; ++r) {
    const double* x = p.row(r);
    for (std::size_t i = 0; i < p.points(); ++i) {
      if (i) out += ',';
      out += format_double(x[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {
std::vector<double> parse_row(const std::string& line, std::size_t lineno) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t end = std::min(line.find(',', pos), line.size());
    const std::string cell = line.substr(pos, end - pos);
    char* stop = nullptr;
    const double x = std::strtod(cell.c_str(), &stop);
    if (cell.empty() || *stop != '\0' || !std::isfinite(x))
      throw DomainError("paths CSV: bad number '" + cell + "' on line " + std::to_string(lineno));
    v.push_back(x);
    pos = end + 1;
  }
  return v;
}
}  // namespace

SamplePathSet paths_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  SamplePathSet p;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto row = parse_row(line, lineno);
    if (p.grid.empty()) {
      p.grid = std::move(row);
      continue;
    }
    if (row.size() != p.grid.size())
      throw DomainError("paths CSV: line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                        " values, expected " + std::to_string(p.grid.size()));
    p.values.insert(p.values.end(), row.begin(), row.end());
    ++p.replicas;
  }
  if (p.grid.empty() || p.replicas == 0) throw DomainError("paths CSV: need a header row and at least one replica");
  p.method = SampleMethod::Spectral;
  p.params = "loaded from CSV";
  return p;
}

std::string report_to_csv(const ModulusReport& r) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < r.delta_grid.size(); ++i)
    rows.push_back({r.delta_grid[i], r.statistic[i], r.plateau_estimate, r.plateau_cv, r.fitted_H, r.fitted_H_stderr});
  return to_csv({"delta", "statistic", "plateau", "cv", "H_hat", "stderr"}, rows);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string manifest_json(const RunConfig& cfg, const std::vector<std::string>& argv,
                          const std::vector<std::uint64_t>& seeds, const std::vector<ManifestEntry>& extra) {
  nlohmann::json j;
  j["artifact"] = {{"name", "spdelab"}, {"version", kVersion}};
  j["command_line"] = argv;
  j["config"] = nlohmann::json::parse(config_to_json(cfg));
  j["seeds"] = seeds;
  auto& v = j["versions"];
  v["fftw"] = std::string(fftw_version);
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["compiler"] = std::string(__VERSION__);
  v["cxx_standard"] = static_cast<long>(__cplusplus);
  j["simd_kernels"] = simd::active_name();
  j["rng"] = "philox4x32-10, counter (block, role, replica), Box-Muller";
  nlohmann::json e = nlohmann::json::object();
  for (const auto& x : extra) e[x.key] = x.value;
  j["extra"] = e;
  return j.dump(2) + "\n";
}

}  // namespace spdelab
