#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "episim/error.hpp"
#include "episim/world.hpp"

namespace episim {

/// Bernoulli gate for infection attempts. Consumes exactly one draw.
inline bool toss_a_coin(Rng& rng, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidProbability, "coin probability outside [0, 1]");
  }
  return rng.uniform01() < p;
}

/// Per-contact infection probability for a susceptible target.
inline double infection_probability(double base, double immunity) { return base * (1.0 - immunity); }

/// Zero for targets that cannot be infected (Infected, Precaution, Recovered).
inline double infection_probability(double base, const Agent& target) {
  if (target.state != AgentState::Susceptible) return 0.0;
  return infection_probability(base, target.immunity);
}

/// Infects k Susceptible residents of `site`, k drawn from seed_infect_range
/// (fewer if fewer are available), and marks the site as seeded.
inline void seed_infection(WorldState& state, SiteId site) {
  const auto& range = state.config.seed_infect_range;
  const auto k = state.rng.uniform_int(range.lo, range.hi);
  std::vector<std::uint32_t> pool;
  for (const auto& a : state.agents) {
    if (a.resident_of(site) && a.state == AgentState::Susceptible) pool.push_back(a.id);
  }
  for (const auto id : sample_without_replacement(std::move(pool), k, state.rng)) {
    state.agents[id].state = AgentState::Infected;
  }
  state.infection_seeded.at(site.index) = true;
}

/// Seeds every site whose infect switch is on and has not been seeded yet.
inline void seed_pending_infections(WorldState& state) {
  for (std::size_t s = 0; s < state.site_count(); ++s) {
    if (state.switches.infect_site[s] && !state.infection_seeded[s]) {
      seed_infection(state, SiteId{s});
    }
  }
}

/// Uniform hash grid over a subset of agents, cell size = query radius.
/// Candidate lists come back sorted by agent id so that callers iterate in
/// the same order as a brute-force scan.
class NeighborGrid {
 public:
  NeighborGrid(const std::vector<Agent>& agents, std::span<const std::uint32_t> members, double cell)
      : cell_(cell) {
    for (const auto id : members) {
      cells_[key(cell_of(agents[id].position.x), cell_of(agents[id].position.y))].push_back(id);
    }
  }

  std::vector<std::uint32_t> candidates(Vec2 p) const {
    std::vector<std::uint32_t> out;
    const auto cx = cell_of(p.x);
    const auto cy = cell_of(p.y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it != cells_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

  static std::uint64_t key(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffu);
  }

  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

/// Synchronous infection spread. Every agent Infected at the start of the
/// phase (ascending id) tries each Susceptible agent within
/// infection_radius (ascending id) with one coin toss at p * (1 - immunity).
/// Agents infected during this phase are neither re-tried nor infectious
/// until the next tick.
inline void propagate(WorldState& state) {
  std::vector<std::uint32_t> infected;
  std::vector<std::uint32_t> susceptible;
  for (const auto& a : state.agents) {
    if (a.state == AgentState::Infected) infected.push_back(a.id);
    if (a.state == AgentState::Susceptible) susceptible.push_back(a.id);
  }
  if (infected.empty() || susceptible.empty()) return;

  const double radius = state.config.infection_radius;
  const double r2 = radius * radius;
  // Cells slightly wider than the radius so rounding in the cell index
  // can never hide a neighbor that passes the exact distance test.
  const NeighborGrid grid(state.agents, susceptible, radius * (1.0 + 1e-6));
  std::vector<bool> newly(state.agents.size(), false);

  for (const auto src : infected) {
    const Vec2 origin = state.agents[src].position;
    for (const auto dst : grid.candidates(origin)) {
      if (newly[dst]) continue;
      const Agent& target = state.agents[dst];
      if (distance2(origin, target.position) > r2) continue;
      if (toss_a_coin(state.rng, infection_probability(state.config.base_infection_prob, target))) {
        newly[dst] = true;
      }
    }
  }
  for (std::size_t i = 0; i < newly.size(); ++i) {
    if (newly[i]) state.agents[i].state = AgentState::Infected;
  }
}

/// Moves k Susceptible agents, world-wide, to Precaution.
inline void do_precautions(WorldState& state) {
  const auto& range = state.config.precaution_per_tick_range;
  const auto k = state.rng.uniform_int(range.lo, range.hi);
  std::vector<std::uint32_t> pool;
  for (const auto& a : state.agents) {
    if (a.state == AgentState::Susceptible) pool.push_back(a.id);
  }
  for (const auto id : sample_without_replacement(std::move(pool), k, state.rng)) {
    state.agents[id].state = AgentState::Precaution;
  }
}

/// Moves k Infected agents to Recovered.
inline void do_recovery(WorldState& state) {
  const auto& range = state.config.recovery_per_tick_range;
  const auto k = state.rng.uniform_int(range.lo, range.hi);
  std::vector<std::uint32_t> pool;
  for (const auto& a : state.agents) {
    if (a.state == AgentState::Infected) pool.push_back(a.id);
  }
  for (const auto id : sample_without_replacement(std::move(pool), k, state.rng)) {
    state.agents[id].state = AgentState::Recovered;
  }
}

}  // namespace episim
