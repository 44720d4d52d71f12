#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "episim/episim.hpp"

namespace episim::testing {

inline SwitchId sw(const SimConfig& config, std::string_view name) {
  auto id = parse_switch_name(config, name);
  if (!id) throw Error(ErrorCode::UnknownSwitch, std::string(name));
  return *id;
}

inline void on(WorldState& state, std::string_view name, bool value = true) {
  const auto outcome = apply_switch(state, name, value);
  if (outcome != SwitchOutcome::Accepted) {
    throw Error(ErrorCode::InvalidConfig, "switch " + std::string(name) + " rejected");
  }
}

inline void add_event(Scenario& s, std::uint64_t tick, std::string_view name, bool value = true) {
  s.events.push_back({tick, sw(s.config, name), value});
}

inline Scenario make_scenario(std::uint64_t seed, std::uint64_t ticks,
                              std::initializer_list<std::pair<std::uint64_t, std::string_view>> events,
                              SimConfig config = {}) {
  Scenario s;
  s.config = std::move(config);
  s.seed = seed;
  s.total_ticks = ticks;
  for (const auto& [tick, name] : events) add_event(s, tick, name);
  return s;
}

inline std::vector<std::string> site_names() { return {"red", "blue", "pink", "cyan", "yellow"}; }

inline std::size_t count_state(const WorldState& w, AgentState s) {
  std::size_t n = 0;
  for (const auto& a : w.agents) n += a.state == s;
  return n;
}

inline std::size_t residents(const WorldState& w, SiteId site) {
  std::size_t n = 0;
  for (const auto& a : w.agents) n += a.resident_of(site);
  return n;
}

/// Applies `count` random switch commands (any switch, any value); returns
/// how many were rejected.
inline std::size_t random_commands(WorldState& w, Rng& gen, int count) {
  const auto ids = all_switches(w.config);
  std::size_t rejected = 0;
  for (int i = 0; i < count; ++i) {
    const auto id = ids[static_cast<std::size_t>(gen.uniform_int(0, static_cast<std::int64_t>(ids.size()) - 1))];
    rejected += apply_switch(w, id, gen.uniform01() < 0.5) != SwitchOutcome::Accepted;
  }
  return rejected;
}

}  // namespace episim::testing
