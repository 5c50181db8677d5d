// Copyright 2026 The btlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "btlab/experiment.hpp"

using nlohmann::json;

namespace {

bool throws_config(const json& cfg) {
  try {
    btlab::normalize_config(cfg);
  } catch (const btlab::Error& e) {
    return e.kind() == btlab::ErrorKind::kConfig;
  }
  return false;
}

json strip_timestamp(json report) {
  report["provenance"].erase("timestamp");
  return report;
}

}  // namespace

TEST_CASE("config validation fails closed") {
  CHECK(throws_config(json::array()));
  CHECK(throws_config(json{{"space", "fock"}}));
  CHECK(throws_config(json{{"experiment", "spectra"}}));
  CHECK(throws_config(json{{"experiment", "spectrum"}, {"colour", "blue"}}));
  CHECK(throws_config(json{{"experiment", "spectrum"}, {"truncation", 65}}));
  CHECK(throws_config(json{{"experiment", "spectrum"}, {"truncation", 2.5}}));
  CHECK(throws_config(json{{"experiment", "spectrum"}, {"space", "bargmann"}}));
  CHECK(throws_config(json{{"experiment", "spectrum"}, {"tolerances", {{"spectrum", 1e-8}}}}));
  CHECK(throws_config(json{{"experiment", "bm-invariance"}, {"sim", {{"n_paths", 20000000}}}}));
  CHECK(throws_config(json{{"experiment", "bm-invariance"}, {"sim", {{"dx", 1}}}}));
  CHECK(throws_config(json{{"experiment", "resolvent-check"}, {"shift", {{"re", "x"}}}}));
  CHECK(throws_config(json{{"experiment", "resolvent-check"}, {"psi_degrees", json::array()}}));
}

TEST_CASE("defaults are filled in and echoed") {
  const auto cfg = btlab::normalize_config(json{{"experiment", "resolvent-check"}});
  CHECK(cfg["space"] == "bg");
  CHECK(cfg["map"] == "square-map");
  CHECK(cfg["truncation"] == 20);
  CHECK(cfg["tolerances"]["resolvent_rel"] == 1e-8);
  const auto cp = btlab::normalize_config(json{{"experiment", "spectrum"}, {"space", "cp1:7"}});
  CHECK(cp["truncation"] == 7);
  const auto custom = btlab::normalize_config(json{{"experiment", "spectrum"}, {"tolerances", {{"spectrum_rel", 1e-3}}}});
  CHECK(custom["tolerances"]["spectrum_rel"] == 1e-3);
  CHECK(custom["tolerances"]["unitarity"] == 1e-10);
}

TEST_CASE("spectrum experiment report") {
  const auto r = btlab::run_experiment(json{{"experiment", "spectrum"}, {"truncation", 10}}, {});
  CHECK(r.passed);
  const auto& ev = r.report["results"]["eigenvalues"];
  REQUIRE(ev.size() == 11);
  for (int n = 0; n <= 10; ++n) CHECK(ev[n].get<double>() == doctest::Approx(n + 1.0));
  for (const auto& c : r.report["checks"]) {
    CHECK(c.contains("tolerance"));
    CHECK(c.contains("pass"));
  }
  CHECK(r.report["schema_version"] == 1);
  CHECK(r.report["provenance"].contains("git_revision"));
}

TEST_CASE("resolvent-check on the square map") {
  const auto r = btlab::run_experiment(json{{"experiment", "resolvent-check"}, {"truncation", 8}}, {});
  CHECK(r.passed);
  CHECK(r.report["results"]["target_truncation"] == 18);
}

TEST_CASE("wrong space for a map is a config error") {
  CHECK_THROWS_AS(btlab::run_experiment(json{{"experiment", "resolvent-check"}, {"space", "fock"}}, {}), btlab::Error);
  CHECK_THROWS_AS(btlab::run_experiment(json{{"experiment", "resolvent-check"}, {"space", "bg"}, {"map", "moebius:1,1"}}, {}),
                  btlab::Error);
}

TEST_CASE("inadmissible shift names the failing check") {
  try {
    btlab::run_experiment(json{{"experiment", "resolvent-check"}, {"truncation", 4}, {"shift", {{"re", 1.0}}}}, {});
    FAIL("expected an error");
  } catch (const btlab::Error& e) {
    CHECK(e.kind() == btlab::ErrorKind::kShiftRejected);
    CHECK(std::string(e.what()).find("check 'transformation psi=z^0'") != std::string::npos);
  }
}

TEST_CASE("reports are reproducible across worker counts") {
  const json cfg = {{"experiment", "substitution-check"},
                    {"sim", {{"n_paths", 400}, {"seed", 5}, {"T_max", 0.3}}},
                    {"t", 0.1}};
  btlab::RunOptions one, many;
  one.workers = 1;
  many.workers = 4;
  const auto a = btlab::run_experiment(cfg, one);
  const auto b = btlab::run_experiment(cfg, many);
  CHECK(strip_timestamp(a.report).dump() == strip_timestamp(b.report).dump());
  btlab::RunOptions seeded = one;
  seeded.seed = 6;
  const auto c = btlab::run_experiment(cfg, seeded);
  CHECK(c.report["config"]["sim"]["seed"] == 6);
  CHECK(c.report["results"]["substitution"]["source"]["mean"] != a.report["results"]["substitution"]["source"]["mean"]);
}

TEST_CASE("config schema is embedded and parses") {
  const auto schema = json::parse(btlab::config_schema());
  CHECK(schema["additionalProperties"] == false);
  CHECK(schema["properties"].contains("tolerances"));
}
