#include <doctest.h>

#include <string>

#include "qhydro/config.hpp"

using namespace qhydro;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("a minimal document resolves every default") {
  auto c = parse_config(R"({"scenario": "free_packet"})");
  CHECK(c.scenario == ScenarioId::free_packet);
  CHECK(c.grid.n == 512);
  CHECK(c.grid.length == 40.0);
  CHECK(c.grid.origin == -20.0);
  CHECK(c.time.dt == 1e-3);
  CHECK(c.constants.hbar == 1.0);
  CHECK(c.constants.mass == 1.0);
  CHECK(c == default_config(ScenarioId::free_packet));
}

TEST_CASE("overrides keep the remaining defaults") {
  auto c = parse_config(R"({"scenario": "quartic_packet", "grid": {"L": 30}, "bohm": {"seed": 9}})");
  CHECK(c.grid.length == 30.0);
  CHECK(c.grid.origin == -15.0);
  CHECK(c.bohm.seed == 9);
  CHECK(c.potential == default_config(ScenarioId::quartic_packet).potential);
}

TEST_CASE("errors name the key and the rule") {
  auto msg = error_of(R"({"scenario": "free_packet", "grid": {"n": 500}})");
  CHECK(msg.find("grid.n") != std::string::npos);
  CHECK(msg.find("power of two") != std::string::npos);

  msg = error_of(R"({"scenario": "free_packet", "grid": {"nn": 512}})");
  CHECK(msg.find("grid.nn") != std::string::npos);
  CHECK(msg.find("unknown key") != std::string::npos);

  msg = error_of(R"({"scenaro": "free_packet"})");
  CHECK_FALSE(msg.empty());

  msg = error_of(R"({"grid": {"n": 256}})");
  CHECK(msg.find("scenario") != std::string::npos);

  CHECK_FALSE(error_of(R"({"scenario": "no_such_thing"})").empty());
  CHECK_FALSE(error_of(R"({"scenario": "free_packet", "time": {"dt": -1}})").empty());
  CHECK_FALSE(error_of(R"({"scenario": "free_packet", "wigner": {"k_max": 3}})").empty());
  CHECK_FALSE(error_of(R"({"scenario": "free_packet", "grid": {"n": "512"}})").empty());
  CHECK_FALSE(error_of("{not json").empty());
}

TEST_CASE("every scenario round-trips through its serialized form") {
  for (ScenarioId id : all_scenarios()) {
    CAPTURE(to_string(id));
    auto c = default_config(id);
    c.bohm.seed = 123;
    c.output.directory = "somewhere/else";
    auto again = parse_config(to_json(c).dump(2));
    CHECK(again == c);
    CHECK(to_json(again).dump() == to_json(c).dump());
  }
}

TEST_CASE("scenario registry") {
  CHECK(all_scenarios().size() == 10);
  for (ScenarioId id : all_scenarios()) {
    CHECK(parse_scenario_id(to_string(id)) == id);
    CHECK_FALSE(describe(id).empty());
    CHECK_NOTHROW(validate(default_config(id)));
  }
  CHECK_FALSE(parse_scenario_id("Free_Packet").has_value());
}

}
