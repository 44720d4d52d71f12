#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace episim;
using episim::testing::on;

TEST(InitWorld, DefaultConfigHasFiveHundredAgentsAndEightDisabledRoutes) {
  const auto w = init_world(SimConfig{}, 1);
  EXPECT_EQ(w.agents.size(), 500u);
  EXPECT_EQ(w.site_count(), 5u);
  EXPECT_EQ(w.route_count(), 8u);
  for (std::size_t r = 0; r < 8; ++r) {
    EXPECT_FALSE(w.route_enabled(RouteId{r}));
    EXPECT_FALSE(w.route_locked(RouteId{r}));
  }
  EXPECT_EQ(w.tick, 0u);
  for (std::size_t s = 0; s < 5; ++s) {
    EXPECT_EQ(episim::testing::residents(w, SiteId{s}), 100u);
  }
}

TEST(InitWorld, AgentsStartSusceptibleInsideTheirDisc) {
  const SimConfig cfg;
  const auto w = init_world(cfg, 9);
  for (std::size_t i = 0; i < w.agents.size(); ++i) {
    const auto& a = w.agents[i];
    EXPECT_EQ(a.id, i);
    EXPECT_EQ(a.state, AgentState::Susceptible);
    EXPECT_EQ(a.home_site, a.site);
    EXPECT_FALSE(a.in_transit());
    EXPECT_FALSE(a.heading);
    EXPECT_LE(distance(a.position, w.site(a.site).center), w.site(a.site).radius);
    EXPECT_GE(a.immunity, cfg.immunity_range.lo);
    EXPECT_LT(a.immunity, cfg.immunity_range.hi);
  }
}

TEST(InitWorld, SwitchesStartOffExceptLocalMobility) {
  const auto w = init_world(SimConfig{}, 1);
  for (const auto id : all_switches(w.config)) {
    EXPECT_EQ(*w.switches.get(id), id.kind == SwitchKind::LocalMobilityAllow)
        << switch_name(w.config, id);
  }
}

TEST(InitWorld, EmptyWorldIsValid) {
  SimConfig cfg;
  cfg.sites = {{"only", {10, 10}, 5}};
  cfg.routes.clear();
  cfg.agents_per_site = 0;
  auto w = init_world(cfg, 3);
  EXPECT_TRUE(w.agents.empty());
  const auto m = step(w);
  EXPECT_EQ(m.pct_infected, 0.0);
  EXPECT_EQ(m.pct_precaution, 0.0);
  EXPECT_EQ(m.pct_recovered, 0.0);
}

TEST(InitWorld, SameSeedIsBitIdentical) {
  const auto a = init_world(SimConfig{}, 42);
  const auto b = init_world(SimConfig{}, 42);
  EXPECT_EQ(a, b);
  const auto c = init_world(SimConfig{}, 43);
  EXPECT_NE(a.agents, c.agents);
}

TEST(InitWorld, InvalidConfigNamesTheField) {
  SimConfig cfg;
  cfg.transit_speed = 0.0;
  try {
    init_world(cfg, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
    EXPECT_NE(std::string(e.what()).find("transit_speed"), std::string::npos);
  }
}

TEST(ApplySwitch, RouteEnableLatches) {
  auto w = init_world(SimConfig{}, 1);
  EXPECT_EQ(apply_switch(w, "route-blue-yellow-enable", true), SwitchOutcome::Accepted);
  const auto before = w.switches;
  EXPECT_EQ(apply_switch(w, "route-blue-yellow-enable", false), SwitchOutcome::LatchingViolation);
  EXPECT_EQ(w.switches, before);
  EXPECT_EQ(apply_switch(w, "route-blue-yellow-enable", true), SwitchOutcome::Accepted);
}

TEST(ApplySwitch, InfectSiteLatches) {
  auto w = init_world(SimConfig{}, 1);
  on(w, "infect-red");
  EXPECT_EQ(apply_switch(w, "infect-red", false), SwitchOutcome::LatchingViolation);
  EXPECT_TRUE(w.switches.infect_site[0]);
}

TEST(ApplySwitch, SiteLockdownClosesIncidentRoutes) {
  auto w = init_world(SimConfig{}, 1);
  on(w, "lockdown-red");
  for (const auto* r : {"lockdown-red-blue", "lockdown-red-pink", "lockdown-red-cyan", "lockdown-red-yellow"}) {
    EXPECT_TRUE(*w.switches.get(*parse_switch_name(w.config, r))) << r;
  }
  for (const auto* r : {"lockdown-blue-yellow", "lockdown-blue-pink", "lockdown-pink-cyan", "lockdown-cyan-yellow"}) {
    EXPECT_FALSE(*w.switches.get(*parse_switch_name(w.config, r))) << r;
  }
}

TEST(ApplySwitch, SiteUnlockDoesNotUnlockRoutesOrMobility) {
  auto w = init_world(SimConfig{}, 1);
  on(w, "lockdown-red");
  on(w, "local-mobility-red-allow", false);
  on(w, "lockdown-red", false);
  EXPECT_FALSE(w.site_locked(SiteId{0}));
  EXPECT_FALSE(w.local_mobility_allowed(SiteId{0}));
  for (std::size_t r = 0; r < 4; ++r) EXPECT_TRUE(w.route_locked(RouteId{r}));
  // explicit unlock sequence
  on(w, "local-mobility-red-allow");
  for (const auto* r : {"lockdown-pink-red", "lockdown-blue-red", "lockdown-cyan-red", "lockdown-yellow-red"}) {
    EXPECT_EQ(apply_switch(w, r, false), SwitchOutcome::Accepted) << r;
  }
  for (std::size_t r = 0; r < 4; ++r) EXPECT_FALSE(w.route_locked(RouteId{r}));
}

TEST(ApplySwitch, RouteUnlockWhileSiteLockedIsRejected) {
  auto w = init_world(SimConfig{}, 1);
  on(w, "lockdown-red");
  EXPECT_EQ(apply_switch(w, "lockdown-red-blue", false), SwitchOutcome::LockdownConflict);
  EXPECT_TRUE(w.route_locked(RouteId{0}));
}

TEST(ApplySwitch, UnknownSwitch) {
  auto w = init_world(SimConfig{}, 1);
  EXPECT_EQ(apply_switch(w, "lockdown-mauve", true), SwitchOutcome::UnknownSwitch);
  EXPECT_EQ(apply_switch(w, "route-red-red-enable", true), SwitchOutcome::UnknownSwitch);
  EXPECT_EQ(apply_switch(w, SwitchId{SwitchKind::SiteLockdown, 5}, true), SwitchOutcome::UnknownSwitch);
  EXPECT_EQ(apply_switch(w, SwitchId{SwitchKind::StartRecovery, 1}, true), SwitchOutcome::UnknownSwitch);
}

TEST(SwitchNames, ThirtyFourSwitchesRoundTrip) {
  const SimConfig cfg;
  const auto ids = all_switches(cfg);
  ASSERT_EQ(ids.size(), 34u);
  for (const auto id : ids) {
    const auto name = switch_name(cfg, id);
    EXPECT_EQ(parse_switch_name(cfg, name), id) << name;
    EXPECT_EQ(parse_switch_name(cfg, name + "?"), id) << name;
  }
  EXPECT_EQ(parse_switch_name(cfg, "lockdown-yellow-blue"), parse_switch_name(cfg, "lockdown-blue-yellow"));
  EXPECT_EQ(parse_switch_name(cfg, "route-yellow-blue-enable?"),
            parse_switch_name(cfg, "route-blue-yellow-enable"));
}

TEST(Tick, FrozenWorldOnlyAdvancesTick) {
  auto w = init_world(SimConfig{}, 5);
  for (const auto& name : episim::testing::site_names()) {
    on(w, "lockdown-" + name);
    on(w, "local-mobility-" + name + "-allow", false);
  }
  auto before = w;
  step(w);
  before.tick += 1;
  EXPECT_EQ(w, before);
}

TEST(Tick, ScriptedRunIsDeterministic) {
  auto s = episim::testing::make_scenario(
      7, 1000,
      {{0, "route-red-blue-enable"}, {0, "route-blue-yellow-enable"}, {0, "infect-red"},
       {5, "propagate-infection"}, {200, "take-precautions"}, {400, "lockdown-blue"},
       {500, "start-recovery"}});
  const auto a = run_scenario(s);
  const auto b = run_scenario(s);
  EXPECT_EQ(a.final_state, b.final_state);
  EXPECT_EQ(a.series, b.series);
}

// Property: random command sequences interleaved with ticks preserve
// population, latching and lockdown closure.
TEST(WorldProperties, RandomCommandSequences) {
  Rng gen(2024);
  for (int trial = 0; trial < 30; ++trial) {
    SimConfig cfg;
    cfg.agents_per_site = 30;
    auto w = init_world(cfg, gen.next());
    auto prev = w.switches;
    for (int t = 0; t < 60; ++t) {
      episim::testing::random_commands(w, gen, 3);
      for (std::size_t r = 0; r < w.route_count(); ++r) {
        EXPECT_TRUE(!prev.route_enable[r] || w.switches.route_enable[r]);
      }
      for (std::size_t s = 0; s < w.site_count(); ++s) {
        EXPECT_TRUE(!prev.infect_site[s] || w.switches.infect_site[s]);
        if (w.site_locked(SiteId{s})) {
          for (std::size_t r = 0; r < w.route_count(); ++r) {
            const auto& route = w.config.routes[r];
            if (route.a == w.config.sites[s].name || route.b == w.config.sites[s].name) {
              EXPECT_TRUE(w.route_locked(RouteId{r}));
            }
          }
        }
      }
      prev = w.switches;
      const auto m = step(w);
      EXPECT_EQ(m.total(), w.agents.size());
      EXPECT_EQ(w.tick, static_cast<std::uint64_t>(t + 1));
    }
  }
}
