#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "episim/config.hpp"
#include "episim/error.hpp"
#include "episim/metrics.hpp"
#include "episim/simulation.hpp"
#include "episim/switchboard.hpp"
#include "episim/validation.hpp"
#include "episim/world.hpp"

namespace episim {

using nlohmann::json;

struct ScenarioEvent {
  std::uint64_t at_tick = 0;
  SwitchId target;
  bool value = false;
  friend bool operator==(const ScenarioEvent&, const ScenarioEvent&) = default;
};

/// A reproducible run: config, seed, length and tick-scheduled switch
/// changes. Events are kept sorted by tick; ties keep file order.
struct Scenario {
  std::string description;
  SimConfig config;
  std::uint64_t seed = 0;
  std::uint64_t total_ticks = 0;
  std::vector<ScenarioEvent> events;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline void reject_unknown_fields(const json& obj, std::string_view where,
                                  std::initializer_list<std::string_view> known) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::UnknownField, std::string(where) + ": unknown field '" + key + "'");
    }
  }
}

inline json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, std::string(what) + ": syntax error at byte " +
                                            std::to_string(e.byte) + ": " + e.what());
  }
}

template <typename T>
T field_as(const json& j, std::string_view field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidConfig, std::string(field) + ": wrong type (" + j.dump() + ")");
  }
}

inline IntRange int_range(const json& j, std::string_view field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw Error(ErrorCode::InvalidConfig, std::string(field) + ": expected [lo, hi] integers");
  }
  return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
}

inline RealRange real_range(const json& j, std::string_view field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::InvalidConfig, std::string(field) + ": expected [lo, hi] numbers");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::int64_t integer(const json& j, std::string_view field) {
  if (!j.is_number_integer()) {
    throw Error(ErrorCode::InvalidConfig, std::string(field) + ": expected an integer");
  }
  return j.get<std::int64_t>();
}

inline double number(const json& j, std::string_view field) {
  if (!j.is_number()) throw Error(ErrorCode::InvalidConfig, std::string(field) + ": expected a number");
  return j.get<double>();
}

}  // namespace detail

/// Reads a config object; absent fields keep their defaults, unknown fields
/// are rejected, and the result must pass validate_world.
inline SimConfig config_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config: expected a JSON object");
  reject_unknown_fields(j, "config",
                        {"world_width", "world_height", "sites", "routes", "agents_per_site",
                         "local_step", "transit_speed", "infection_radius", "base_infection_prob",
                         "immunity_range", "seed_infect_range", "travel_batch_range",
                         "travel_period", "precaution_per_tick_range", "recovery_per_tick_range"});
  SimConfig c;
  if (j.contains("world_width")) c.world_width = number(j["world_width"], "world_width");
  if (j.contains("world_height")) c.world_height = number(j["world_height"], "world_height");
  if (j.contains("sites")) {
    if (!j["sites"].is_array()) throw Error(ErrorCode::InvalidConfig, "sites: expected an array");
    c.sites.clear();
    for (const auto& s : j["sites"]) {
      if (!s.is_object()) throw Error(ErrorCode::InvalidConfig, "sites: expected objects");
      reject_unknown_fields(s, "sites[]", {"name", "x", "y", "radius"});
      if (!s.contains("name") || !s.contains("x") || !s.contains("y") || !s.contains("radius")) {
        throw Error(ErrorCode::InvalidConfig, "sites: each site needs name, x, y, radius");
      }
      c.sites.push_back({field_as<std::string>(s["name"], "sites[].name"),
                         {number(s["x"], "sites[].x"), number(s["y"], "sites[].y")},
                         number(s["radius"], "sites[].radius")});
    }
  }
  if (j.contains("routes")) {
    if (!j["routes"].is_array()) throw Error(ErrorCode::InvalidConfig, "routes: expected an array");
    c.routes.clear();
    for (const auto& r : j["routes"]) {
      if (!r.is_array() || r.size() != 2 || !r[0].is_string() || !r[1].is_string()) {
        throw Error(ErrorCode::InvalidConfig, "routes: expected [site, site] name pairs");
      }
      c.routes.push_back({r[0].get<std::string>(), r[1].get<std::string>()});
    }
  }
  if (j.contains("agents_per_site")) c.agents_per_site = integer(j["agents_per_site"], "agents_per_site");
  if (j.contains("local_step")) c.local_step = number(j["local_step"], "local_step");
  if (j.contains("transit_speed")) c.transit_speed = number(j["transit_speed"], "transit_speed");
  if (j.contains("infection_radius")) c.infection_radius = number(j["infection_radius"], "infection_radius");
  if (j.contains("base_infection_prob")) {
    c.base_infection_prob = number(j["base_infection_prob"], "base_infection_prob");
  }
  if (j.contains("immunity_range")) c.immunity_range = real_range(j["immunity_range"], "immunity_range");
  if (j.contains("seed_infect_range")) {
    c.seed_infect_range = int_range(j["seed_infect_range"], "seed_infect_range");
  }
  if (j.contains("travel_batch_range")) {
    c.travel_batch_range = int_range(j["travel_batch_range"], "travel_batch_range");
  }
  if (j.contains("travel_period")) c.travel_period = integer(j["travel_period"], "travel_period");
  if (j.contains("precaution_per_tick_range")) {
    c.precaution_per_tick_range = int_range(j["precaution_per_tick_range"], "precaution_per_tick_range");
  }
  if (j.contains("recovery_per_tick_range")) {
    c.recovery_per_tick_range = int_range(j["recovery_per_tick_range"], "recovery_per_tick_range");
  }
  require_valid(c);
  return c;
}

inline json config_to_json(const SimConfig& c) {
  json sites = json::array();
  for (const auto& s : c.sites) {
    sites.push_back({{"name", s.name}, {"x", s.center.x}, {"y", s.center.y}, {"radius", s.radius}});
  }
  json routes = json::array();
  for (const auto& r : c.routes) routes.push_back({r.a, r.b});
  return json{{"world_width", c.world_width},
              {"world_height", c.world_height},
              {"sites", sites},
              {"routes", routes},
              {"agents_per_site", c.agents_per_site},
              {"local_step", c.local_step},
              {"transit_speed", c.transit_speed},
              {"infection_radius", c.infection_radius},
              {"base_infection_prob", c.base_infection_prob},
              {"immunity_range", {c.immunity_range.lo, c.immunity_range.hi}},
              {"seed_infect_range", {c.seed_infect_range.lo, c.seed_infect_range.hi}},
              {"travel_batch_range", {c.travel_batch_range.lo, c.travel_batch_range.hi}},
              {"travel_period", c.travel_period},
              {"precaution_per_tick_range", {c.precaution_per_tick_range.lo, c.precaution_per_tick_range.hi}},
              {"recovery_per_tick_range", {c.recovery_per_tick_range.lo, c.recovery_per_tick_range.hi}}};
}

inline SimConfig parse_config(std::string_view text) {
  return config_from_json(detail::parse_json_text(text, "config"));
}

/// Replays events through the switchboard rules starting from the initial
/// board. Throws on the first latching violation or lockdown conflict.
inline void check_event_schedule(const SimConfig& config, const std::vector<ScenarioEvent>& events) {
  auto board = SwitchBoard::initial(config.sites.size(), config.routes.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const auto outcome = board.apply(config, e.target, e.value);
    const std::string where = "events: '" + switch_name(config, e.target) + "' := " +
                              (e.value ? "true" : "false") + " at tick " + std::to_string(e.at_tick);
    switch (outcome) {
      case SwitchOutcome::Accepted: break;
      case SwitchOutcome::UnknownSwitch: throw Error(ErrorCode::UnknownSwitch, where + ": unknown switch");
      case SwitchOutcome::LatchingViolation:
        throw Error(ErrorCode::LatchingViolation, where + ": switch latches on and cannot be turned off");
      case SwitchOutcome::LockdownConflict:
        throw Error(ErrorCode::LockdownConflict, where + ": an endpoint site is still locked down");
    }
  }
}

inline Scenario scenario_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "scenario: expected a JSON object");
  reject_unknown_fields(j, "scenario", {"description", "config", "seed", "total_ticks", "events"});

  Scenario s;
  if (j.contains("description")) s.description = field_as<std::string>(j["description"], "description");
  if (j.contains("config")) s.config = config_from_json(j["config"]);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw Error(ErrorCode::InvalidConfig, "seed: expected a non-negative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("total_ticks")) {
    if (!j["total_ticks"].is_number_unsigned()) {
      throw Error(ErrorCode::NegativeTick, "total_ticks: expected a non-negative integer");
    }
    s.total_ticks = j["total_ticks"].get<std::uint64_t>();
  }
  if (j.contains("events")) {
    if (!j["events"].is_array()) throw Error(ErrorCode::InvalidConfig, "events: expected an array");
    for (const auto& e : j["events"]) {
      if (!e.is_object()) throw Error(ErrorCode::InvalidConfig, "events: expected objects");
      reject_unknown_fields(e, "events[]", {"at_tick", "switch", "value"});
      if (!e.contains("at_tick") || !e.contains("switch") || !e.contains("value")) {
        throw Error(ErrorCode::InvalidConfig, "events: each event needs at_tick, switch, value");
      }
      const auto& tick = e["at_tick"];
      if (!tick.is_number_integer()) throw Error(ErrorCode::InvalidConfig, "events[].at_tick: expected an integer");
      if (tick.get<std::int64_t>() < 0) {
        throw Error(ErrorCode::NegativeTick, "events[].at_tick: negative tick " + tick.dump());
      }
      const auto name = field_as<std::string>(e["switch"], "events[].switch");
      const auto id = parse_switch_name(s.config, name);
      if (!id) throw Error(ErrorCode::UnknownSwitch, "events[].switch: unknown switch '" + name + "'");
      if (!e["value"].is_boolean()) throw Error(ErrorCode::InvalidConfig, "events[].value: expected a boolean");
      s.events.push_back({tick.get<std::uint64_t>(), *id, e["value"].get<bool>()});
    }
  }
  std::stable_sort(s.events.begin(), s.events.end(),
                   [](const ScenarioEvent& a, const ScenarioEvent& b) { return a.at_tick < b.at_tick; });
  check_event_schedule(s.config, s.events);
  return s;
}

inline Scenario parse_scenario(std::string_view text) {
  return scenario_from_json(detail::parse_json_text(text, "scenario"));
}

inline json scenario_to_json(const Scenario& s) {
  json events = json::array();
  for (const auto& e : s.events) {
    events.push_back({{"at_tick", e.at_tick}, {"switch", switch_name(s.config, e.target)}, {"value", e.value}});
  }
  json out{{"config", config_to_json(s.config)},
           {"seed", s.seed},
           {"total_ticks", s.total_ticks},
           {"events", events}};
  if (!s.description.empty()) out["description"] = s.description;
  return out;
}

inline std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

/// Headless driver: applies each event at the boundary of its tick, then
/// steps. Used by the CLI and as the reference trajectory for live runs.
class ScenarioRunner {
 public:
  explicit ScenarioRunner(Scenario scenario)
      : scenario_(std::move(scenario)), state_(init_world(scenario_.config, scenario_.seed)) {}

  bool finished() const { return state_.tick >= scenario_.total_ticks; }

  /// Applies every event scheduled for the current tick, in order.
  void apply_due_events() {
    while (next_event_ < scenario_.events.size() &&
           scenario_.events[next_event_].at_tick <= state_.tick) {
      const auto& e = scenario_.events[next_event_++];
      apply_switch(state_, e.target, e.value);
    }
  }

  const MetricsSample& advance() {
    apply_due_events();
    series_.push_back(step(state_));
    return series_.back();
  }

  const Scenario& scenario() const { return scenario_; }
  const WorldState& state() const { return state_; }
  const MetricsSeries& series() const { return series_; }

 private:
  Scenario scenario_;
  WorldState state_;
  MetricsSeries series_;
  std::size_t next_event_ = 0;
};

using TickObserver = std::function<void(const WorldState&, const MetricsSample&)>;

struct RunResult {
  WorldState final_state;
  MetricsSeries series;
};

/// Runs a scenario to total_ticks. The observer, if any, sees the state
/// after every tick.
inline RunResult run_scenario(const Scenario& scenario, const TickObserver& observer = {}) {
  ScenarioRunner runner(scenario);
  while (!runner.finished()) {
    const auto& sample = runner.advance();
    if (observer) observer(runner.state(), sample);
  }
  return {runner.state(), runner.series()};
}

}  // namespace episim
