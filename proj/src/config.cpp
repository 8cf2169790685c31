#include "spdelab/config.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"
#include "spdelab/acceptance.hpp"

namespace spdelab {

using nlohmann::json;

namespace {

// Tracks the key path while the parser runs so duplicates can be reported.
class DuplicateGuard {
 public:
  bool operator()(int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start:
        stack_.push_back({true, {}, "", 0});
        break;
      case json::parse_event_t::array_start:
        stack_.push_back({false, {}, "", 0});
        break;
      case json::parse_event_t::key: {
        auto& f = stack_.back();
        const std::string k = parsed.get<std::string>();
        f.current = k;
        if (!f.keys.insert(k).second) throw ConfigError("config: duplicate key at " + path());
        break;
      }
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        stack_.pop_back();
        bump();
        break;
      case json::parse_event_t::value:
        bump();
        break;
    }
    return true;
  }

 private:
  struct Frame {
    bool object;
    std::set<std::string> keys;
    std::string current;
    std::size_t index;
  };
  void bump() {
    if (!stack_.empty() && !stack_.back().object) ++stack_.back().index;
  }
  std::string path() const {
    std::string p;
    for (const auto& f : stack_) p += f.object ? "/" + f.current : "/" + std::to_string(f.index);
    return p;
  }
  std::vector<Frame> stack_;
};

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("config: unknown key " + where + "/" + k);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("config: " + path + " must be a number");
  return j.get<double>();
}

std::uint64_t get_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    throw ConfigError("config: " + path + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError("config: " + path + " must be a string");
  return j.get<std::string>();
}

}  // namespace

Family parse_family(const std::string& s) {
  if (s == "LKS" || s == "lks") return Family::LKS;
  if (s == "TF" || s == "tf") return Family::TF;
  throw ConfigError("unknown family '" + s + "' (expected LKS or TF)");
}

std::string family_name(Family f) { return f == Family::LKS ? "LKS" : "TF"; }

RunConfig default_config() {
  RunConfig c;
  c.tolerances = default_tolerances();
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, DuplicateGuard{});
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed document: ") + e.what());
  }
  RunConfig c = default_config();
  check_keys(j, "", {"command", "model", "grids", "seeds", "replicas", "tolerances", "output_dir", "only", "fixture"});

  if (j.contains("command")) {
    c.command = get_string(j["command"], "/command");
    static const std::set<std::string> cmds{"verify", "simulate", "moduli", "specfun", "kernel", "spectral", "cov"};
    if (!cmds.count(c.command)) throw ConfigError("config: /command has unknown value '" + c.command + "'");
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    check_keys(m, "/model", {"family", "d", "epsilon", "theta", "beta", "t"});
    if (m.contains("family")) {
      try {
        c.params.family = parse_family(get_string(m["family"], "/model/family"));
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("config: /model/family: ") + e.what());
      }
    }
    if (m.contains("d")) c.params.dim = static_cast<int>(get_count(m["d"], "/model/d"));
    if (m.contains("epsilon")) c.params.epsilon = get_number(m["epsilon"], "/model/epsilon");
    if (m.contains("theta")) c.params.theta = get_number(m["theta"], "/model/theta");
    if (m.contains("beta")) c.params.beta = get_number(m["beta"], "/model/beta");
    if (m.contains("t")) c.t = get_number(m["t"], "/model/t");
    if (c.params.family == Family::LKS && m.contains("beta"))
      throw ConfigError("config: /model/beta is only meaningful for family TF");
    if (c.params.family == Family::TF && (m.contains("epsilon") || m.contains("theta")))
      throw ConfigError("config: /model/epsilon and /model/theta are only meaningful for family LKS");
    if (c.params.dim < 1 || c.params.dim > 3) throw ConfigError("config: /model/d must be 1, 2 or 3");
    if (c.params.family == Family::TF && !(c.params.beta > 0.0 && c.params.beta <= 0.5))
      throw ConfigError("config: /model/beta must lie in (0, 1/2]");
    if (c.params.family == Family::LKS && !(c.params.epsilon > 0.0))
      throw ConfigError("config: /model/epsilon must be positive");
    if (!(c.t > 0.0)) throw ConfigError("config: /model/t must be positive");
  }
  if (j.contains("grids")) {
    const auto& g = j["grids"];
    check_keys(g, "/grids", {"time", "space"});
    for (const auto& [name, spec] : g.items()) {
      const std::string p = "/grids/" + name;
      check_keys(spec, p, {"start", "spacing", "points"});
      GridSpec s;
      if (spec.contains("start")) s.start = get_number(spec["start"], p + "/start");
      if (!spec.contains("spacing") || !spec.contains("points"))
        throw ConfigError("config: " + p + " needs spacing and points");
      s.spacing = get_number(spec["spacing"], p + "/spacing");
      s.points = get_count(spec["points"], p + "/points");
      if (!(s.spacing > 0.0)) throw ConfigError("config: " + p + "/spacing must be positive");
      if (s.points < 2) throw ConfigError("config: " + p + "/points must be at least 2");
      if (name == "time" && s.start < 0.0) throw ConfigError("config: /grids/time/start must be >= 0");
      c.grids[name] = s;
    }
  }
  if (j.contains("seeds")) {
    const auto& s = j["seeds"];
    if (!s.is_array() || s.empty()) throw ConfigError("config: /seeds must be a non-empty array");
    c.seeds.clear();
    for (std::size_t i = 0; i < s.size(); ++i) c.seeds.push_back(get_count(s[i], "/seeds/" + std::to_string(i)));
  }
  if (j.contains("replicas")) {
    c.replicas = get_count(j["replicas"], "/replicas");
    if (c.replicas < 1) throw ConfigError("config: /replicas must be >= 1");
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("config: /tolerances must be an object");
    for (const auto& [k, v] : t.items()) {
      if (!c.tolerances.count(k)) throw ConfigError("config: unknown key /tolerances/" + k);
      const double x = get_number(v, "/tolerances/" + k);
      if (!(x >= 0.0)) throw ConfigError("config: /tolerances/" + k + " must be >= 0");
      c.tolerances[k] = x;
    }
  }
  if (j.contains("output_dir")) c.output_dir = get_string(j["output_dir"], "/output_dir");
  if (j.contains("only")) {
    const auto& o = j["only"];
    if (!o.is_array()) throw ConfigError("config: /only must be an array");
    for (std::size_t i = 0; i < o.size(); ++i) c.only.push_back(get_string(o[i], "/only/" + std::to_string(i)));
    try {
      (void)select_criteria(c.only);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: /only: ") + e.what());
    }
  }
  if (j.contains("fixture")) {
    const auto& f = j["fixture"];
    check_keys(f, "/fixture", {"perturb_constant"});
    if (f.contains("perturb_constant")) c.perturb_constant = get_number(f["perturb_constant"], "/fixture/perturb_constant");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  json m;
  m["family"] = family_name(c.params.family);
  m["d"] = c.params.dim;
  if (c.params.family == Family::LKS) {
    m["epsilon"] = c.params.epsilon;
    m["theta"] = c.params.theta;
  } else {
    m["beta"] = c.params.beta;
  }
  m["t"] = c.t;
  j["model"] = m;
  json g = json::object();
  for (const auto& [k, s] : c.grids) g[k] = {{"start", s.start}, {"spacing", s.spacing}, {"points", s.points}};
  j["grids"] = g;
  j["seeds"] = c.seeds;
  j["replicas"] = c.replicas;
  j["tolerances"] = c.tolerances;
  j["output_dir"] = c.output_dir;
  j["only"] = c.only;
  j["fixture"] = {{"perturb_constant", c.perturb_constant}};
  return j.dump(2);
}

}  // namespace spdelab
