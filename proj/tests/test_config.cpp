#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "gen.hpp"
#include "lagsync/config.hpp"
#include "lagsync/error.hpp"

using namespace lagsync;

namespace {

std::string with_replaced(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

std::string bundled() { return std::string(bundled_scenario_text("paper_example")); }

Scenario random_scenario(gen::Gen& g) {
  Scenario s = example_scenario();
  s.name = "random_" + std::to_string(g.integer(0, 1000));
  s.graph = g.rooted_digraph(6);
  s.D_diag.reset();
  for (auto& a : s.agents) {
    if (g.coin()) continue;
    for (int j = 0; j < 6; ++j) a.theta[j] = g.uniform(s.theta_ranges[j].first, s.theta_ranges[j].second);
    if (g.coin(0.2)) a.gravity = g.uniform(1.0, 10.0);
  }
  s.observer.c2 = g.log_uniform(0.1, 10.0);
  s.observer.c3 = g.log_uniform(0.1, 10.0);
  s.observer.a = g.odd_ratio(0.0, 1.0);
  s.observer.b = g.odd_ratio(1.0 / s.observer.a.value(), 1.0 / s.observer.a.value() + 4.0);
  s.controller.gains.alpha = g.odd_ratio(0.5, 1.0);
  s.controller.gains.beta = g.odd_ratio(1.0, 3.0);
  s.controller.gains.gamma1 = g.log_uniform(0.1, 100.0);
  s.controller.gains.gamma2 = g.log_uniform(0.1, 100.0);
  s.controller.gains.k1 = g.log_uniform(0.1, 100.0);
  s.controller.gains.k2 = g.log_uniform(0.1, 100.0);
  s.controller.kappa = g.uniform(1.0, 5.0);
  s.controller.u1_smooth_radius = g.coin() ? 0.0 : g.log_uniform(1e-4, 1e-1);
  s.integrator.step = g.log_uniform(1e-5, 1e-2);
  s.integrator.horizon = g.uniform(0.5, 30.0);
  s.integrator.record_every = g.integer(1, 50);
  s.initial.eta_scale = g.log_uniform(1e-2, 1e2);
  s.tolerance = g.log_uniform(1e-6, 1e-2);
  s.seed = (static_cast<std::uint64_t>(g.integer(0, 1 << 30)) << 33) | static_cast<std::uint64_t>(g.integer(0, 1 << 30));
  return s;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("bundled scenario equals the built-in one") {
  CHECK(parse_config_text(bundled()) == example_scenario());
  CHECK(load_scenario("paper_example") == example_scenario());
  CHECK(bundled_scenario_text("nope").empty());
}

TEST_CASE("emit and parse round trip") {
  CHECK(parse_config_text(emit_config(example_scenario())) == example_scenario());
  gen::Gen g(17);
  for (int k = 0; k < 50; ++k) {
    const Scenario s = random_scenario(g);
    const std::string text = emit_config(s);
    INFO(text);
    const Scenario back = parse_config_text(text);
    CHECK(back == s);
    CHECK(emit_config(back) == text);
  }
}

TEST_CASE("config files load from disk") {
  const auto path = std::filesystem::temp_directory_path() / "lagsync_config_test.toml";
  {
    std::ofstream out(path);
    out << with_replaced(bundled(), "seed = 2021", "seed = 5");
  }
  const Scenario s = load_scenario(path.string());
  CHECK(s.seed == 5);
  std::filesystem::remove(path);
  CHECK_THROWS(load_scenario("/nonexistent/lagsync.toml"));
}

TEST_CASE("empty file names the first missing key") {
  try {
    parse_config_text("");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.key() == "network.followers");
  }
}

TEST_CASE("even exponents are rejected with the key") {
  try {
    parse_config_text(with_replaced(bundled(), "alpha = \"7/9\"", "alpha = \"2/4\""));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.key() == "controller.alpha");
    CHECK(std::string(e.what()).find("2/4") != std::string::npos);
  }
}

TEST_CASE("malformed text reports line and column") {
  try {
    parse_config_text("name = \"x\"\n[network]\nfollowers = = 6\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 1);
  }
  CHECK_THROWS_AS(parse_config_text("[network\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text("name = \"unterminated\n"), ParseError);
  CHECK_THROWS_AS(parse_config_text("x = [1, 2\n"), ParseError);
}

TEST_CASE("unknown and duplicate keys") {
  try {
    parse_config_text(with_replaced(bundled(), "kappa = 3", "kappa = 3\nkapa = 3"));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.key() == "controller.kapa");
  }
  CHECK_THROWS_AS(parse_config_text(with_replaced(bundled(), "kappa = 3", "kappa = 3\nkappa = 4")), ParseError);
}

TEST_CASE("invalid values name their key") {
  auto key_of = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ValidationError& e) {
      return e.key();
    }
    return std::string("none");
  };
  CHECK(key_of(with_replaced(bundled(), "step = 1e-4", "step = -1")) == "integrator.step");
  CHECK(key_of(with_replaced(bundled(), "epsilon = \"11/19\"", "epsilon = 0.5")) == "controller.epsilon");
  CHECK(key_of(with_replaced(bundled(), "mode = \"fixed\"", "mode = \"finite\"")) != "none");
  CHECK(key_of(with_replaced(bundled(), "edge = [0, 4, 1]", "edge = [0, 9, 1]")) == "network.edge");
}

TEST_CASE("per-agent overrides") {
  const Scenario s =
      parse_config_text(bundled() + "\n[agent.3]\ntheta = [6, 0.9, 1.1, 6, 1.6, 1.1]\ngravity = 3.7\n");
  CHECK(s.agents[2].theta[0] == 6.0);
  CHECK(s.agents[2].gravity == 3.7);
  CHECK(s.agents[1] == example_scenario().agents[1]);
  CHECK(parse_config_text(emit_config(s)) == s);
  CHECK_THROWS_AS(parse_config_text(bundled() + "\n[agent.9]\ngravity = 1\n"), ValidationError);
}

}  // TEST_SUITE
