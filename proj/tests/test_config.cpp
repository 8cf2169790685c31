#include <doctest.h>

#include <cmath>
#include <cstring>

#include "json.hpp"
#include "spdelab/acceptance.hpp"
#include "spdelab/config.hpp"
#include "spdelab/csv.hpp"
#include "spdelab/sampler.hpp"

using namespace spdelab;

TEST_CASE("minimal config fills defaults") {
  const auto c = parse_config(R"({"model": {"family": "LKS", "d": 2, "t": 0.5}})");
  CHECK(c.params.family == Family::LKS);
  CHECK(c.params.dim == 2);
  CHECK(c.t == 0.5);
  CHECK(c.params.epsilon == 1.0);
  CHECK(c.command == "verify");
  CHECK_FALSE(c.seeds.empty());
  CHECK(c.tolerances.size() == default_tolerances().size());
  CHECK(c.tolerances.at("c4.cov_rel") == 1e-6);
}

TEST_CASE("invalid documents are rejected with the key path") {
  auto msg = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(msg(R"({"model": {"family": "TF", "beta": 0.7}})").find("/model/beta") != std::string::npos);
  CHECK(msg(R"({"model": {"d": 1, "d": 2}})").find("duplicate key at /model/d") != std::string::npos);
  CHECK(msg(R"({"model": {"famly": "TF"}})").find("/model/famly") != std::string::npos);
  CHECK(msg(R"({"tolerances": {"c99.x": 1}})").find("/tolerances/c99.x") != std::string::npos);
  CHECK(msg(R"({"grids": {"time": {"spacing": -1, "points": 10}}})").find("/grids/time/spacing") !=
        std::string::npos);
  CHECK(msg(R"({"seeds": []})").find("/seeds") != std::string::npos);
  CHECK(msg(R"({"model": {"family": "LKS", "beta": 0.25}})").find("/model/beta") != std::string::npos);
  CHECK(msg(R"({"only": ["nope"]})").find("/only") != std::string::npos);
  CHECK(msg("{\"model\": ").find("malformed") != std::string::npos);
}

TEST_CASE("config echo parses back to the same configuration") {
  const auto c = parse_config(
      R"({"model": {"family": "TF", "beta": 0.25, "d": 3}, "seeds": [5, 6], "replicas": 12,
          "grids": {"time": {"start": 0, "spacing": 0.001, "points": 1001}}, "only": ["spectral"]})");
  const auto back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(back.params.beta == 0.25);
  CHECK(back.grids.at("time").points == 1001);
}

TEST_CASE("criterion selection") {
  CHECK(select_criteria({}).size() == 12);
  CHECK(select_criteria({"spectral"}) == std::vector<int>{7, 8});
  CHECK(select_criteria({"4", "1"}) == std::vector<int>{1, 4});
  CHECK_THROWS(select_criteria({"13"}));
}

TEST_CASE("numbers print with 17 significant digits and round-trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    const auto s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("paths CSV round trip is exact") {
  const auto b = sample_brownian(50, 1.0, 3, 4);
  const auto text = paths_to_csv(b);
  const auto back = paths_from_csv(text);
  CHECK(back.grid == b.grid);
  CHECK(back.replicas == 3);
  CHECK(std::memcmp(back.values.data(), b.values.data(), b.values.size() * sizeof(double)) == 0);
  CHECK(paths_to_csv(back) == text);
  CHECK_THROWS(paths_from_csv("0,1\n1\n"));
}

TEST_CASE("manifest records the configuration, seeds and versions") {
  auto c = default_config();
  c.seeds = {3, 4};
  const auto j = nlohmann::json::parse(manifest_json(c, {"spdelab-cli", "verify"}, c.seeds, {{"k", "v"}}));
  CHECK(j.at("seeds") == nlohmann::json::array({3, 4}));
  CHECK(j.contains("config"));
  CHECK(j.at("command_line").size() == 2);
  CHECK(j.at("extra").at("k") == "v");
  CHECK(j.at("versions").contains("fftw"));
}
