#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "episim/error.hpp"
#include "episim/world.hpp"

namespace episim {

/// A route usable for new departures: enabled, not locked down, and
/// neither endpoint site locked down.
inline bool route_open(const WorldState& state, RouteId route) {
  if (route.index >= state.route_count()) {
    throw Error(ErrorCode::UnknownRoute, "unknown route index " + std::to_string(route.index));
  }
  return state.route_enabled(route) && !state.route_locked(route) &&
         !state.site_locked(state.route_endpoint_a(route)) &&
         !state.site_locked(state.route_endpoint_b(route));
}

struct OpenRoute {
  RouteId route;
  SiteId neighbor;
};

/// Open routes incident to `site`, in route-table order.
inline std::vector<OpenRoute> open_routes_from(const WorldState& state, SiteId site) {
  std::vector<OpenRoute> out;
  for (std::size_t r = 0; r < state.route_count(); ++r) {
    const RouteId id{r};
    const SiteId a = state.route_endpoint_a(id);
    const SiteId b = state.route_endpoint_b(id);
    if ((a == site || b == site) && route_open(state, id)) {
      out.push_back({id, a == site ? b : a});
    }
  }
  return out;
}

/// One random-walk step of length `step` in a uniform heading (one draw).
/// A step leaving the disc is reflected; if the reflection also leaves it,
/// the forward step is pulled radially back inside.
inline Vec2 local_move(Vec2 position, const SiteSpec& site, double step, Rng& rng) {
  const double theta = 2.0 * std::numbers::pi * rng.uniform01();
  const Vec2 d{step * std::cos(theta), step * std::sin(theta)};
  const double r2 = site.radius * site.radius;

  const Vec2 forward = position + d;
  if (distance2(forward, site.center) <= r2) return forward;
  const Vec2 back = position - d;
  if (distance2(back, site.center) <= r2) return back;

  const Vec2 offset = forward - site.center;
  const double scale = site.radius * (1.0 - 1e-12) / offset.norm();
  return site.center + scale * offset;
}

/// Chooses a destination uniformly among `neighbors` (one draw) and records
/// it as the agent's heading. No draw and no heading when there are none.
inline std::optional<SiteId> mobility_direction(Agent& agent, std::span<const SiteId> neighbors,
                                                Rng& rng) {
  if (neighbors.empty()) return std::nullopt;
  const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(neighbors.size()) - 1);
  agent.heading = neighbors[static_cast<std::size_t>(pick)];
  return agent.heading;
}

/// On travel ticks (tick % travel_period == 0), for each site in order with
/// at least one open route and unfrozen residents: draw k from
/// travel_batch_range, sample k residents, then give each sampled agent (in
/// sampling order) a destination and a transit plan.
inline void assign_travelers(WorldState& state) {
  const auto& cfg = state.config;
  if (state.tick % static_cast<std::uint64_t>(cfg.travel_period) != 0) return;

  for (std::size_t s = 0; s < state.site_count(); ++s) {
    const SiteId site{s};
    if (state.site_frozen(site)) continue;
    const auto open = open_routes_from(state, site);
    if (open.empty()) continue;

    const auto k = state.rng.uniform_int(cfg.travel_batch_range.lo, cfg.travel_batch_range.hi);
    std::vector<std::uint32_t> residents;
    for (const auto& a : state.agents) {
      if (a.resident_of(site)) residents.push_back(a.id);
    }
    const auto travelers = sample_without_replacement(std::move(residents), k, state.rng);

    std::vector<SiteId> neighbors;
    neighbors.reserve(open.size());
    for (const auto& o : open) neighbors.push_back(o.neighbor);

    for (const auto id : travelers) {
      Agent& agent = state.agents[id];
      const auto dest = mobility_direction(agent, neighbors, state.rng);
      RouteId route{};
      for (const auto& o : open) {
        if (o.neighbor == *dest) route = o.route;
      }
      const Vec2 to_dest = state.site(*dest).center - agent.position;
      agent.transit = TransitPlan{route, *dest, (1.0 / to_dest.norm()) * to_dest};
    }
  }
}

/// Moves an in-transit agent transit_speed units along its direction.
/// Returns true when the agent entered the destination disc this tick and
/// became its resident. Route or site lockdowns do not stop a transit.
inline bool advance_transit(Agent& agent, const SimConfig& config) {
  if (!agent.transit) return false;
  const auto& plan = *agent.transit;
  const auto& dest = config.sites.at(plan.destination.index);

  const double remaining = distance(agent.position, dest.center);
  const Vec2 next = agent.position + config.transit_speed * plan.direction;
  if (distance2(next, dest.center) <= dest.radius * dest.radius) {
    agent.position = next;
  } else if (remaining <= config.transit_speed) {
    agent.position = dest.center;  // step would jump over the whole disc
  } else {
    agent.position = next;
    return false;
  }
  agent.site = plan.destination;
  agent.transit.reset();
  agent.heading.reset();
  return true;
}

/// Movement phase: agents by ascending id; in-transit agents advance,
/// residents of unfrozen sites take one local step.
inline void move_agents(WorldState& state) {
  for (auto& agent : state.agents) {
    if (agent.in_transit()) {
      advance_transit(agent, state.config);
    } else if (!state.site_frozen(agent.site)) {
      agent.position = local_move(agent.position, state.site(agent.site), state.config.local_step,
                                  state.rng);
    }
  }
}

}  // namespace episim
