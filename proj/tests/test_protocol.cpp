#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace episim;

namespace {

Snapshot random_snapshot(Rng& gen) {
  SimConfig cfg;
  cfg.agents_per_site = gen.uniform_int(0, 6);
  auto w = init_world(cfg, gen.next());
  for (std::size_t r = 0; r < w.route_count(); ++r) apply_switch(w, SwitchId{SwitchKind::RouteEnable, r}, true);
  episim::testing::random_commands(w, gen, 10);
  MetricsSample m;
  const auto ticks = gen.uniform_int(0, 25);
  for (std::int64_t t = 0; t < ticks; ++t) m = step(w);
  return make_snapshot(w, m);
}

Command random_command(Rng& gen) {
  Command c;
  c.kind = static_cast<CommandKind>(gen.uniform_int(0, 4));
  if (gen.uniform01() < 0.5) c.id = gen.uniform_int(-1000, 1000000);
  switch (c.kind) {
    case CommandKind::ToggleSwitch:
      c.switch_name = switch_name(SimConfig{}, all_switches(SimConfig{})[static_cast<std::size_t>(gen.uniform_int(0, 33))]);
      c.value = gen.uniform01() < 0.5;
      break;
    case CommandKind::SetSpeed: c.tick_rate = gen.uniform(0.1, 200.0); break;
    case CommandKind::Reset:
      if (gen.uniform01() < 0.7) c.seed = gen.next();
      if (gen.uniform01() < 0.5) {
        Scenario s = episim::testing::make_scenario(gen.next(), 100, {{3, "infect-red"}});
        s.config.base_infection_prob = gen.uniform01();
        c.scenario = s;
      }
      break;
    default: break;
  }
  return c;
}

}  // namespace

TEST(Protocol, DecodesToggleCommandExample) {
  const auto msg = decode_message(R"({"type":"command","kind":"toggle_switch","switch":"lockdown-red","value":true})");
  const auto* cmd = std::get_if<CommandMsg>(&msg);
  ASSERT_NE(cmd, nullptr);
  EXPECT_EQ(cmd->command.kind, CommandKind::ToggleSwitch);
  EXPECT_EQ(cmd->command.switch_name, "lockdown-red");
  EXPECT_TRUE(cmd->command.value);
  EXPECT_FALSE(cmd->command.id);
}

TEST(Protocol, FramesAreNewlineTerminatedSingleLines) {
  Rng gen(5);
  const auto frame = encode_message(SnapshotMsg{random_snapshot(gen)});
  ASSERT_FALSE(frame.empty());
  EXPECT_EQ(frame.back(), '\n');
  EXPECT_EQ(std::count(frame.begin(), frame.end(), '\n'), 1);
}

TEST(Protocol, HelloCarriesConfigAndSchemaVersion) {
  const auto frame = encode_message(HelloMsg{kSchemaVersion, SimConfig{}});
  const auto j = nlohmann::json::parse(frame);
  EXPECT_EQ(j["type"], "hello");
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["config"]["agents_per_site"], 100);
  EXPECT_EQ(j["switches"].size(), 34u);
  EXPECT_EQ(std::get<HelloMsg>(decode_message(frame)), (HelloMsg{kSchemaVersion, SimConfig{}}));
}

TEST(Protocol, MalformedFramesRaiseMalformedMessage) {
  const auto full = encode_message(ErrorMsg{"latching_violation", "nope", 4});
  for (const std::string& bad : {full.substr(0, full.size() / 2), std::string("[1,2]"), std::string("{}"),
                                std::string(R"({"type":"bogus"})"), std::string(R"({"type":"command","kind":"fly"})"),
                                std::string(R"({"type":"command","kind":"toggle_switch","switch":3,"value":true})"),
                                std::string(R"({"type":"ack","kind":"pause","id":"x"})"), std::string("")}) {
    try {
      decode_message(bad);
      ADD_FAILURE() << "decoded: " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedMessage) << bad;
    }
  }
}

TEST(Protocol, SplitFramesKeepsPartialTail) {
  std::string buf = "{\"a\":1}\n\n{\"b\":2}\n{\"c\"";
  const auto frames = split_frames(buf);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[1], "{\"b\":2}");
  EXPECT_EQ(buf, "{\"c\"");
}

TEST(Protocol, SnapshotReflectsWorld) {
  auto w = init_world(SimConfig{}, 2);
  episim::testing::on(w, "route-red-blue-enable");
  episim::testing::on(w, "lockdown-red");
  step(w);
  const auto s = make_snapshot(w, compute_metrics(w));
  EXPECT_EQ(s.tick, 1u);
  EXPECT_EQ(s.agents.size(), 500u);
  EXPECT_TRUE(s.sites[0].locked);
  EXPECT_TRUE(s.routes[0].enabled);
  EXPECT_TRUE(s.routes[0].locked);
  EXPECT_FALSE(s.routes[0].open);
  EXPECT_TRUE(s.switches.at("lockdown-red-yellow"));
  EXPECT_TRUE(s.switches.at("local-mobility-red-allow"));
  EXPECT_EQ(s.switches.size(), 34u);
}

// Property: decode(encode(m)) == m for every frame type.
TEST(ProtocolProperties, RoundTripAllFrameTypes) {
  Rng gen(31337);
  for (int i = 0; i < 1000; ++i) {
    Message msg;
    switch (i % 6) {
      case 0: {
        SimConfig cfg;
        cfg.agents_per_site = gen.uniform_int(0, 300);
        cfg.infection_radius = gen.uniform(0.1, 4.0);
        msg = HelloMsg{kSchemaVersion, cfg};
        break;
      }
      case 1: msg = CommandMsg{random_command(gen)}; break;
      case 2: {
        AckMsg ack{static_cast<CommandKind>(gen.uniform_int(0, 4)), std::nullopt};
        if (gen.uniform01() < 0.5) ack.id = gen.uniform_int(0, 1 << 30);
        msg = ack;
        break;
      }
      case 3:
        msg = ErrorMsg{"latching_violation", "message \"" + std::to_string(gen.next()) + "\"\n",
                       gen.uniform01() < 0.5 ? std::optional<std::int64_t>(7) : std::nullopt};
        break;
      case 4: {
        MetricsSample m;
        m.tick = gen.next() >> 12;
        m.susceptible = static_cast<std::uint64_t>(gen.uniform_int(0, 500));
        m.infected = static_cast<std::uint64_t>(gen.uniform_int(0, 500));
        m.pct_infected = gen.uniform(0, 100);
        m.pct_precaution = gen.uniform(0, 100);
        m.pct_recovered = gen.uniform(0, 100);
        msg = MetricsMsg{m};
        break;
      }
      default: msg = SnapshotMsg{random_snapshot(gen)}; break;
    }
    const auto frame = encode_message(msg);
    ASSERT_EQ(decode_message(frame), msg) << frame;
  }
}
