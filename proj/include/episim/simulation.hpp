#pragma once

#include "episim/epidemic.hpp"
#include "episim/metrics.hpp"
#include "episim/mobility.hpp"
#include "episim/world.hpp"

namespace episim {

/// Advances the world by one tick. Switch changes must be applied before
/// calling. Phase order is fixed and every fixture depends on it:
///   1. seed infection for infect switches not yet seeded
///   2. assign travelers (on travel ticks)
///   3. movement: transit advance or local step, ascending id
///   4. propagate         (if propagate-infection)
///   5. do_precautions    (if take-precautions)
///   6. do_recovery       (if start-recovery)
///   7. metrics, labelled with the tick just executed
/// The tick counter is then incremented.
inline MetricsSample step(WorldState& state) {
  seed_pending_infections(state);
  assign_travelers(state);
  move_agents(state);
  if (state.switches.propagate_infection) propagate(state);
  if (state.switches.take_precautions) do_precautions(state);
  if (state.switches.start_recovery) do_recovery(state);
  const MetricsSample sample = compute_metrics(state);
  ++state.tick;
  return sample;
}

}  // namespace episim
