#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "episim/error.hpp"
#include "episim/metrics.hpp"
#include "episim/scenario.hpp"
#include "episim/world.hpp"

// Wire protocol between the simulation service and its clients. Every
// frame is one JSON object followed by '\n' with a "type" of hello,
// command, ack, error, metrics or snapshot.

namespace episim {

inline constexpr int kSchemaVersion = 1;

enum class CommandKind { ToggleSwitch, Pause, Resume, SetSpeed, Reset };

constexpr std::string_view to_string(CommandKind k) {
  switch (k) {
    case CommandKind::ToggleSwitch: return "toggle_switch";
    case CommandKind::Pause: return "pause";
    case CommandKind::Resume: return "resume";
    case CommandKind::SetSpeed: return "set_speed";
    case CommandKind::Reset: return "reset";
  }
  return "toggle_switch";
}

inline std::optional<CommandKind> command_kind_from_string(std::string_view s) {
  for (auto k : {CommandKind::ToggleSwitch, CommandKind::Pause, CommandKind::Resume,
                 CommandKind::SetSpeed, CommandKind::Reset}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

struct Command {
  CommandKind kind = CommandKind::ToggleSwitch;
  std::optional<std::int64_t> id;  // client-chosen correlation id, echoed in ack/error
  std::string switch_name;         // toggle_switch
  bool value = false;              // toggle_switch
  double tick_rate = 0.0;          // set_speed, ticks per second
  std::optional<std::uint64_t> seed;   // reset
  std::optional<Scenario> scenario;    // reset
  friend bool operator==(const Command&, const Command&) = default;
};

struct AgentView {
  std::uint32_t id = 0;
  double x = 0.0;
  double y = 0.0;
  AgentState state = AgentState::Susceptible;
  std::string home;
  std::string site;         // empty while in transit
  std::string route;        // empty while resident
  std::string destination;  // empty while resident
  friend bool operator==(const AgentView&, const AgentView&) = default;
};

struct SiteView {
  std::string name;
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
  bool locked = false;
  bool local_mobility = true;
  friend bool operator==(const SiteView&, const SiteView&) = default;
};

struct RouteView {
  std::string name;
  std::string a;
  std::string b;
  bool enabled = false;
  bool locked = false;
  bool open = false;
  friend bool operator==(const RouteView&, const RouteView&) = default;
};

/// World as seen at one tick boundary.
struct Snapshot {
  std::uint64_t tick = 0;
  std::vector<AgentView> agents;
  std::vector<SiteView> sites;
  std::vector<RouteView> routes;
  std::map<std::string, bool> switches;
  MetricsSample metrics;
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct HelloMsg {
  int schema_version = kSchemaVersion;
  SimConfig config;
  friend bool operator==(const HelloMsg&, const HelloMsg&) = default;
};

struct CommandMsg {
  Command command;
  friend bool operator==(const CommandMsg&, const CommandMsg&) = default;
};

struct AckMsg {
  CommandKind kind = CommandKind::ToggleSwitch;
  std::optional<std::int64_t> id;
  friend bool operator==(const AckMsg&, const AckMsg&) = default;
};

struct ErrorMsg {
  std::string code;
  std::string message;
  std::optional<std::int64_t> id;
  friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

struct MetricsMsg {
  MetricsSample sample;
  friend bool operator==(const MetricsMsg&, const MetricsMsg&) = default;
};

struct SnapshotMsg {
  Snapshot snapshot;
  friend bool operator==(const SnapshotMsg&, const SnapshotMsg&) = default;
};

using Message = std::variant<HelloMsg, CommandMsg, AckMsg, ErrorMsg, MetricsMsg, SnapshotMsg>;

inline Snapshot make_snapshot(const WorldState& state, const MetricsSample& latest) {
  const auto& cfg = state.config;
  Snapshot s;
  s.tick = state.tick;
  s.metrics = latest;
  s.agents.reserve(state.agents.size());
  for (const auto& a : state.agents) {
    AgentView v{a.id, a.position.x, a.position.y, a.state, cfg.sites[a.home_site.index].name, {}, {}, {}};
    if (a.transit) {
      v.route = route_name(cfg, a.transit->route);
      v.destination = cfg.sites[a.transit->destination.index].name;
    } else {
      v.site = cfg.sites[a.site.index].name;
    }
    s.agents.push_back(std::move(v));
  }
  for (std::size_t i = 0; i < cfg.sites.size(); ++i) {
    const auto& site = cfg.sites[i];
    s.sites.push_back({site.name, site.center.x, site.center.y, site.radius,
                       state.switches.site_lockdown[i], state.switches.local_mobility_allow[i]});
  }
  for (std::size_t i = 0; i < cfg.routes.size(); ++i) {
    const RouteId r{i};
    const bool locked_endpoint =
        state.site_locked(state.route_endpoint_a(r)) || state.site_locked(state.route_endpoint_b(r));
    s.routes.push_back({route_name(cfg, r), cfg.routes[i].a, cfg.routes[i].b, state.route_enabled(r),
                        state.route_locked(r),
                        state.route_enabled(r) && !state.route_locked(r) && !locked_endpoint});
  }
  for (const auto id : all_switches(cfg)) {
    s.switches[switch_name(cfg, id)] = *state.switches.get(id);
  }
  return s;
}

namespace detail {

inline void put_id(json& j, const std::optional<std::int64_t>& id) {
  if (id) j["id"] = *id;
}

inline std::optional<std::int64_t> get_id(const json& j) {
  if (!j.contains("id") || j["id"].is_null()) return std::nullopt;
  return j["id"].get<std::int64_t>();
}

inline json command_to_json(const Command& c) {
  json j{{"type", "command"}, {"kind", to_string(c.kind)}};
  put_id(j, c.id);
  switch (c.kind) {
    case CommandKind::ToggleSwitch:
      j["switch"] = c.switch_name;
      j["value"] = c.value;
      break;
    case CommandKind::SetSpeed: j["tick_rate"] = c.tick_rate; break;
    case CommandKind::Reset:
      if (c.seed) j["seed"] = *c.seed;
      if (c.scenario) j["scenario"] = scenario_to_json(*c.scenario);
      break;
    case CommandKind::Pause:
    case CommandKind::Resume: break;
  }
  return j;
}

inline Command command_from_json(const json& j) {
  Command c;
  const auto kind = command_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::MalformedMessage, "unknown command kind " + j.at("kind").dump());
  c.kind = *kind;
  c.id = get_id(j);
  switch (c.kind) {
    case CommandKind::ToggleSwitch:
      c.switch_name = j.at("switch").get<std::string>();
      c.value = j.at("value").get<bool>();
      break;
    case CommandKind::SetSpeed: c.tick_rate = j.at("tick_rate").get<double>(); break;
    case CommandKind::Reset:
      if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("scenario")) c.scenario = scenario_from_json(j["scenario"]);
      break;
    case CommandKind::Pause:
    case CommandKind::Resume: break;
  }
  return c;
}

inline json snapshot_to_json(const Snapshot& s) {
  json agents = json::array();
  for (const auto& a : s.agents) {
    json v{{"id", a.id}, {"x", a.x}, {"y", a.y}, {"state", to_string(a.state)}, {"home", a.home}};
    if (a.route.empty()) {
      v["site"] = a.site;
    } else {
      v["route"] = a.route;
      v["destination"] = a.destination;
    }
    agents.push_back(std::move(v));
  }
  json sites = json::array();
  for (const auto& site : s.sites) {
    sites.push_back({{"name", site.name}, {"x", site.x}, {"y", site.y}, {"radius", site.radius},
                     {"locked", site.locked}, {"local_mobility", site.local_mobility}});
  }
  json routes = json::array();
  for (const auto& r : s.routes) {
    routes.push_back({{"name", r.name}, {"a", r.a}, {"b", r.b}, {"enabled", r.enabled},
                      {"locked", r.locked}, {"open", r.open}});
  }
  return json{{"type", "snapshot"}, {"tick", s.tick},       {"agents", agents},
              {"sites", sites},     {"routes", routes},     {"switches", s.switches},
              {"metrics", s.metrics}};
}

inline Snapshot snapshot_from_json(const json& j) {
  Snapshot s;
  s.tick = j.at("tick").get<std::uint64_t>();
  for (const auto& v : j.at("agents")) {
    AgentView a;
    a.id = v.at("id").get<std::uint32_t>();
    a.x = v.at("x").get<double>();
    a.y = v.at("y").get<double>();
    const auto state = agent_state_from_string(v.at("state").get<std::string>());
    if (!state) throw Error(ErrorCode::MalformedMessage, "unknown agent state " + v.at("state").dump());
    a.state = *state;
    a.home = v.at("home").get<std::string>();
    if (v.contains("route")) {
      a.route = v.at("route").get<std::string>();
      a.destination = v.at("destination").get<std::string>();
    } else {
      a.site = v.at("site").get<std::string>();
    }
    s.agents.push_back(std::move(a));
  }
  for (const auto& v : j.at("sites")) {
    s.sites.push_back({v.at("name").get<std::string>(), v.at("x").get<double>(), v.at("y").get<double>(),
                       v.at("radius").get<double>(), v.at("locked").get<bool>(),
                       v.at("local_mobility").get<bool>()});
  }
  for (const auto& v : j.at("routes")) {
    s.routes.push_back({v.at("name").get<std::string>(), v.at("a").get<std::string>(),
                        v.at("b").get<std::string>(), v.at("enabled").get<bool>(),
                        v.at("locked").get<bool>(), v.at("open").get<bool>()});
  }
  s.switches = j.at("switches").get<std::map<std::string, bool>>();
  s.metrics = j.at("metrics").get<MetricsSample>();
  return s;
}

struct MessageToJson {
  json operator()(const HelloMsg& m) const {
    json switches = json::array();
    for (const auto id : all_switches(m.config)) {
      switches.push_back({{"name", switch_name(m.config, id)}, {"latching", is_latching(id.kind)}});
    }
    return json{{"type", "hello"},
                {"schema_version", m.schema_version},
                {"config", config_to_json(m.config)},
                {"switches", switches}};
  }
  json operator()(const CommandMsg& m) const { return command_to_json(m.command); }
  json operator()(const AckMsg& m) const {
    json j{{"type", "ack"}, {"kind", to_string(m.kind)}};
    put_id(j, m.id);
    return j;
  }
  json operator()(const ErrorMsg& m) const {
    json j{{"type", "error"}, {"code", m.code}, {"message", m.message}};
    put_id(j, m.id);
    return j;
  }
  json operator()(const MetricsMsg& m) const {
    json j = m.sample;
    j["type"] = "metrics";
    return j;
  }
  json operator()(const SnapshotMsg& m) const { return snapshot_to_json(m.snapshot); }
};

}  // namespace detail

/// One frame: compact JSON object plus a terminating newline.
inline std::string encode_message(const Message& msg) {
  return std::visit(detail::MessageToJson{}, msg).dump() + "\n";
}

/// Decodes one frame (a trailing newline is optional). Any malformed input
/// raises Error with ErrorCode::MalformedMessage.
inline Message decode_message(std::string_view frame) {
  if (!frame.empty() && frame.back() == '\n') frame.remove_suffix(1);
  try {
    const json j = json::parse(frame);
    if (!j.is_object()) throw Error(ErrorCode::MalformedMessage, "frame is not a JSON object");
    const auto type = j.at("type").get<std::string>();
    if (type == "hello") {
      return HelloMsg{j.at("schema_version").get<int>(), config_from_json(j.at("config"))};
    }
    if (type == "command") return CommandMsg{detail::command_from_json(j)};
    if (type == "ack") {
      const auto kind = command_kind_from_string(j.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorCode::MalformedMessage, "unknown command kind in ack");
      return AckMsg{*kind, detail::get_id(j)};
    }
    if (type == "error") {
      return ErrorMsg{j.at("code").get<std::string>(), j.at("message").get<std::string>(), detail::get_id(j)};
    }
    if (type == "metrics") return MetricsMsg{j.get<MetricsSample>()};
    if (type == "snapshot") return SnapshotMsg{detail::snapshot_from_json(j)};
    throw Error(ErrorCode::MalformedMessage, "unknown frame type '" + type + "'");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MalformedMessage) throw;
    throw Error(ErrorCode::MalformedMessage, e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedMessage, std::string("malformed frame: ") + e.what());
  }
}

/// Splits a buffer into newline-terminated frames; any trailing partial
/// frame is left in `buffer`.
inline std::vector<std::string> split_frames(std::string& buffer) {
  std::vector<std::string> frames;
  std::size_t start = 0;
  for (std::size_t nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n', start)) {
    if (nl > start) frames.emplace_back(buffer.substr(start, nl - start));
    start = nl + 1;
  }
  buffer.erase(0, start);
  return frames;
}

}  // namespace episim
