#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "json.hpp"
#include "popeq/config.hpp"
#include "popeq/error.hpp"
#include "popeq/report.hpp"

using namespace popeq;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "model": {"family": "bdi", "a": 1, "b": 0.5, "d": 2, "offspring": [[1, 0.5], [2, 0.5]]},
    "study": "convergence",
    "n_grid": [50, 100, 200, 400]
  })");
}

ErrorKind kind_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("config accepted");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("a minimal convergence config parses with defaults") {
  const auto cfg = parse_config(base());
  CHECK(cfg.study == Study::Convergence);
  CHECK(cfg.n_grid.size() == 4);
  CHECK(cfg.k == 12.0);
  CHECK(cfg.replicas == 4);
  CHECK(cfg.output.csv);
  CHECK(cfg.output.json);
  CHECK_FALSE(cfg.output.plotdata);
  const auto m = model_from_json(cfg.model);
  CHECK(m.jump_support() == std::vector<int>{-1, 1, 2});
}

TEST_CASE("validation failures are config errors") {
  auto doc = base();
  doc.erase("n_grid");
  CHECK(kind_of(doc) == ErrorKind::ConfigError);

  doc = base();
  doc["bogus"] = 1;
  CHECK(kind_of(doc) == ErrorKind::ConfigError);

  doc = base();
  doc["study"] = "stationary";
  CHECK(kind_of(doc) == ErrorKind::ConfigError);

  doc = base();
  doc["model"]["d"] = -1.0;
  CHECK(kind_of(doc) == ErrorKind::ConfigError);

  doc = base();
  doc["model"]["family"] = "logistic";
  CHECK(kind_of(doc) == ErrorKind::ConfigError);

  doc = base();
  doc["truncation"] = {{"k", 1.0}};
  CHECK(kind_of(doc) == ErrorKind::ConfigError);

  doc = base();
  doc["output"] = {{"formats", {"csv", "xml"}}};
  CHECK(kind_of(doc) == ErrorKind::ConfigError);

  doc = base();
  doc["delta"] = 0.1;
  doc["delta_prime"] = 0.2;
  CHECK(kind_of(doc) == ErrorKind::ConfigError);

  CHECK(kind_of(json::array()) == ErrorKind::ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/popeq.json"), Error);
}

TEST_CASE("study names accept both spellings") {
  CHECK(parse_study("stein_audit") == Study::SteinAudit);
  CHECK(parse_study("SteinAudit") == Study::SteinAudit);
  CHECK(parse_study("StationaryOnce") == Study::StationaryOnce);
  CHECK_THROWS_AS(parse_study("nope"), Error);
}

TEST_CASE("config serialisation round-trips") {
  auto doc = base();
  doc["simulation"] = {{"seed", 42}, {"t_sample", 100.0}, {"replicas", 2}};
  doc["truncation"] = {{"k", 10.0}, {"solver", "direct"}};
  doc["bracket"] = {0.01, 5.0};
  doc["output"] = {{"dir", "x"}, {"formats", {"csv", "plotdata"}}};
  const auto cfg = parse_config(doc);
  const auto again = parse_config(config_to_json(cfg));
  CHECK(config_to_json(again) == config_to_json(cfg));
  CHECK(again.seed == 42);
  CHECK(again.solver == StationarySolver::Direct);
  CHECK(again.bracket->hi == 5.0);
  CHECK_FALSE(again.output.json);
  CHECK(again.output.plotdata);
}

TEST_CASE("affine and tabulated model blocks") {
  const auto aff = model_from_json(json::parse(
      R"({"family": "affine", "rates": [{"j": 1, "u": 1}, {"j": -1, "v": 2}]})"));
  CHECK(aff.drift(0.5) == doctest::Approx(0.0));
  const auto tab = model_from_json(json::parse(
      R"({"family": "tabulated", "rates": [{"j": 1, "z": [0, 1], "rate": [1, 1]},
                                          {"j": -1, "z": [0, 1], "rate": [0, 2]}]})"));
  CHECK(tab.drift(0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"family": "affine", "rates": [{"j": 1}, {"j": 1}]})")), Error);
}

TEST_CASE("number formatting is locale free and shortest") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5e-12) == "-2.5e-12");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
