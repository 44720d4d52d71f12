#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <stop_token>
#include <thread>
#include <utility>
#include <vector>

#include "episim/protocol.hpp"
#include "episim/scenario.hpp"
#include "episim/simulation.hpp"

namespace episim {

using ClientId = std::uint64_t;

/// Client id used for commands that do not come from a connection.
inline constexpr ClientId kLocalClient = 0;

/// A message bound for one client, or for everyone when `target` is empty.
struct Outbound {
  std::optional<ClientId> target;
  Message message;
};

using EventSink = std::function<void(const Outbound&)>;

struct QueuedCommand {
  Command command;
  ClientId client = kLocalClient;
};

/// Thread-safe FIFO between network sessions and the simulation loop.
class CommandQueue {
 public:
  void push(QueuedCommand cmd) {
    std::lock_guard lock(mutex_);
    items_.push_back(std::move(cmd));
  }

  std::vector<QueuedCommand> drain() {
    std::lock_guard lock(mutex_);
    std::vector<QueuedCommand> out(std::make_move_iterator(items_.begin()),
                                   std::make_move_iterator(items_.end()));
    items_.clear();
    return out;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::deque<QueuedCommand> items_;
};

struct LiveOptions {
  double tick_rate = 20.0;               // ticks per second
  std::uint64_t snapshot_interval = 1;   // ticks between snapshots
  bool start_paused = false;
};

/// A switch change that took effect, with the tick boundary it preceded.
struct AppliedSwitch {
  std::uint64_t tick = 0;
  SwitchId target;
  bool value = false;
  friend bool operator==(const AppliedSwitch&, const AppliedSwitch&) = default;
};

/// The live simulation loop. One thread calls iterate() (or run()); any
/// thread may submit commands or read copies of the current state.
///
/// At each tick boundary the queued commands are applied in FIFO order,
/// then the scenario events due at that tick; then, unless paused, one
/// tick runs. Metrics go out every tick and snapshots every
/// snapshot_interval ticks, plus whenever a switch changed.
class LiveSimulation {
 public:
  LiveSimulation(Scenario scenario, LiveOptions options, EventSink sink = {})
      : scenario_(std::move(scenario)),
        options_(options),
        sink_(std::move(sink)),
        state_(init_world(scenario_.config, scenario_.seed)),
        paused_(options.start_paused) {
    if (options_.snapshot_interval == 0) options_.snapshot_interval = 1;
  }

  void set_sink(EventSink sink) {
    std::lock_guard lock(mutex_);
    sink_ = std::move(sink);
  }

  /// Validates and enqueues a command. Returns the immediate reply for the
  /// issuing client: an ack, or an error for an unknown switch or a bad
  /// tick rate. Latching violations are only detected when the command is
  /// applied and come back later as an error event.
  Message submit(const Command& cmd, ClientId client = kLocalClient) {
    if (cmd.kind == CommandKind::ToggleSwitch) {
      std::lock_guard lock(mutex_);
      if (!parse_switch_name(state_.config, cmd.switch_name)) {
        return ErrorMsg{std::string(to_string(ErrorCode::UnknownSwitch)),
                        "unknown switch '" + cmd.switch_name + "'", cmd.id};
      }
    }
    if (cmd.kind == CommandKind::SetSpeed && !(std::isfinite(cmd.tick_rate) && cmd.tick_rate > 0.0)) {
      return ErrorMsg{std::string(to_string(ErrorCode::MalformedMessage)), "tick_rate must be > 0", cmd.id};
    }
    queue_.push({cmd, client});
    return AckMsg{cmd.kind, cmd.id};
  }

  /// One loop iteration. Returns true if a tick was executed.
  bool iterate() {
    std::lock_guard lock(mutex_);
    bool switches_changed = false;
    bool was_reset = false;

    for (auto& [cmd, client] : queue_.drain()) {
      switch (cmd.kind) {
        case CommandKind::ToggleSwitch: {
          const auto id = parse_switch_name(state_.config, cmd.switch_name);
          const auto outcome = id ? apply_switch(state_, *id, cmd.value) : SwitchOutcome::UnknownSwitch;
          if (outcome == SwitchOutcome::Accepted) {
            applied_.push_back({state_.tick, *id, cmd.value});
            switches_changed = true;
          } else {
            emit(client, ErrorMsg{std::string(to_string(outcome)),
                                  rejection_message(cmd, outcome), cmd.id});
          }
          break;
        }
        case CommandKind::Pause: paused_ = true; break;
        case CommandKind::Resume: paused_ = false; break;
        case CommandKind::SetSpeed: options_.tick_rate = cmd.tick_rate; break;
        case CommandKind::Reset:
          if (cmd.scenario) scenario_ = *cmd.scenario;
          if (cmd.seed) scenario_.seed = *cmd.seed;
          state_ = init_world(scenario_.config, scenario_.seed);
          series_.clear();
          applied_.clear();
          next_event_ = 0;
          was_reset = true;
          break;
      }
    }
    if (was_reset) {
      emit(std::nullopt, HelloMsg{kSchemaVersion, state_.config});
      switches_changed = true;
    }

    if (paused_) {
      if (switches_changed) emit(std::nullopt, SnapshotMsg{make_snapshot(state_, latest())});
      return false;
    }

    while (next_event_ < scenario_.events.size() &&
           scenario_.events[next_event_].at_tick <= state_.tick) {
      const auto& e = scenario_.events[next_event_++];
      if (apply_switch(state_, e.target, e.value) == SwitchOutcome::Accepted) {
        applied_.push_back({state_.tick, e.target, e.value});
        switches_changed = true;
      }
    }

    series_.push_back(step(state_));
    emit(std::nullopt, MetricsMsg{series_.back()});
    if (switches_changed || state_.tick % options_.snapshot_interval == 0) {
      emit(std::nullopt, SnapshotMsg{make_snapshot(state_, series_.back())});
    }
    return true;
  }

  /// Paced loop at tick_rate until stop is requested.
  void run(std::stop_token stop) {
    using clock = std::chrono::steady_clock;
    auto next = clock::now();
    while (!stop.stop_requested()) {
      iterate();
      const auto period = std::chrono::duration<double>(1.0 / tick_rate());
      next += std::chrono::duration_cast<clock::duration>(period);
      const auto now = clock::now();
      if (next < now - std::chrono::seconds(1)) next = now;  // fell far behind
      std::this_thread::sleep_until(next);
    }
  }

  HelloMsg hello() const {
    std::lock_guard lock(mutex_);
    return HelloMsg{kSchemaVersion, state_.config};
  }

  Snapshot snapshot() const {
    std::lock_guard lock(mutex_);
    return make_snapshot(state_, latest());
  }

  MetricsSeries series() const {
    std::lock_guard lock(mutex_);
    return series_;
  }

  WorldState state() const {
    std::lock_guard lock(mutex_);
    return state_;
  }

  Scenario scenario() const {
    std::lock_guard lock(mutex_);
    return scenario_;
  }

  std::vector<AppliedSwitch> applied_log() const {
    std::lock_guard lock(mutex_);
    return applied_;
  }

  bool paused() const {
    std::lock_guard lock(mutex_);
    return paused_;
  }

  double tick_rate() const {
    std::lock_guard lock(mutex_);
    return options_.tick_rate;
  }

  std::size_t pending_commands() const { return queue_.size(); }

 private:
  MetricsSample latest() const { return series_.empty() ? compute_metrics(state_) : series_.back(); }

  void emit(std::optional<ClientId> target, Message msg) const {
    if (sink_) sink_(Outbound{target, std::move(msg)});
  }

  std::string rejection_message(const Command& cmd, SwitchOutcome outcome) const {
    switch (outcome) {
      case SwitchOutcome::LatchingViolation:
        return "switch '" + cmd.switch_name + "' latches on and cannot be turned off";
      case SwitchOutcome::LockdownConflict:
        return "route '" + cmd.switch_name + "' cannot be unlocked while an endpoint site is locked down";
      default: return "unknown switch '" + cmd.switch_name + "'";
    }
  }

  mutable std::mutex mutex_;
  CommandQueue queue_;
  Scenario scenario_;
  LiveOptions options_;
  EventSink sink_;
  WorldState state_;
  MetricsSeries series_;
  std::vector<AppliedSwitch> applied_;
  std::size_t next_event_ = 0;
  bool paused_ = false;
};

/// Rebuilds the schedule a live session actually applied as a scenario, so
/// it can be replayed headlessly.
inline Scenario replay_scenario(const Scenario& base, const std::vector<AppliedSwitch>& applied,
                                std::uint64_t total_ticks) {
  Scenario out = base;
  out.total_ticks = total_ticks;
  out.events.clear();
  for (const auto& a : applied) out.events.push_back({a.tick, a.target, a.value});
  return out;
}

}  // namespace episim
