#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "episim/config.hpp"
#include "episim/error.hpp"
#include "episim/rng.hpp"
#include "episim/switchboard.hpp"
#include "episim/types.hpp"
#include "episim/validation.hpp"

namespace episim {

/// Complete simulation state at a tick boundary. Copies are independent
/// snapshots; two states compare equal only if every agent, switch and the
/// random stream are identical.
struct WorldState {
  SimConfig config;
  std::uint64_t tick = 0;
  std::vector<Agent> agents;  // agents[i].id == i
  SwitchBoard switches;
  std::vector<bool> infection_seeded;  // per site; seeding runs once per run
  Rng rng;

  std::size_t site_count() const { return config.sites.size(); }
  std::size_t route_count() const { return config.routes.size(); }
  const SiteSpec& site(SiteId s) const { return config.sites.at(s.index); }

  SiteId route_endpoint_a(RouteId r) const { return *find_site(config, config.routes.at(r.index).a); }
  SiteId route_endpoint_b(RouteId r) const { return *find_site(config, config.routes.at(r.index).b); }

  bool site_locked(SiteId s) const { return switches.site_lockdown.at(s.index); }
  bool local_mobility_allowed(SiteId s) const { return switches.local_mobility_allow.at(s.index); }
  bool route_enabled(RouteId r) const { return switches.route_enable.at(r.index); }
  bool route_locked(RouteId r) const { return switches.route_lockdown.at(r.index); }

  /// Residents of a locked site with local mobility off do not move.
  bool site_frozen(SiteId s) const { return site_locked(s) && !local_mobility_allowed(s); }

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

namespace detail {

inline Vec2 uniform_point_in_disc(Vec2 center, double radius, Rng& rng) {
  const double r = radius * std::sqrt(rng.uniform01());
  const double theta = 2.0 * std::numbers::pi * rng.uniform01();
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace detail

inline void require_valid(const SimConfig& config) {
  const auto violations = validate_world(config);
  if (!violations.empty()) {
    std::string msg = "invalid config";
    for (const auto& v : violations) msg += "; " + v.field + ": " + v.message;
    throw Error(ErrorCode::InvalidConfig, msg);
  }
}

/// Builds the initial world: agents_per_site agents uniformly placed in each
/// site's disc (sites in config order, agents numbered consecutively), each
/// Susceptible with immunity drawn from immunity_range.
/// Draw order per agent: radius, angle, immunity.
inline WorldState init_world(const SimConfig& config, std::uint64_t seed) {
  require_valid(config);

  WorldState state;
  state.config = config;
  state.rng = Rng(seed);
  state.switches = SwitchBoard::initial(config.sites.size(), config.routes.size());
  state.infection_seeded.assign(config.sites.size(), false);

  const auto per_site = static_cast<std::size_t>(config.agents_per_site);
  state.agents.reserve(per_site * config.sites.size());
  for (std::size_t s = 0; s < config.sites.size(); ++s) {
    const auto& site = config.sites[s];
    for (std::size_t k = 0; k < per_site; ++k) {
      Agent a;
      a.id = static_cast<std::uint32_t>(state.agents.size());
      a.home_site = SiteId{s};
      a.site = SiteId{s};
      a.position = detail::uniform_point_in_disc(site.center, site.radius, state.rng);
      a.immunity = state.rng.uniform(config.immunity_range.lo, config.immunity_range.hi);
      state.agents.push_back(a);
    }
  }
  return state;
}

inline SwitchOutcome apply_switch(WorldState& state, SwitchId id, bool value) {
  return state.switches.apply(state.config, id, value);
}

inline SwitchOutcome apply_switch(WorldState& state, std::string_view name, bool value) {
  const auto id = parse_switch_name(state.config, name);
  if (!id) return SwitchOutcome::UnknownSwitch;
  return apply_switch(state, *id, value);
}

}  // namespace episim
