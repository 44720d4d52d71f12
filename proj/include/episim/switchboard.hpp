#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "episim/config.hpp"

namespace episim {

enum class SwitchKind {
  RouteEnable,         // latching
  RouteLockdown,
  SiteLockdown,        // closes every incident route
  LocalMobilityAllow,
  InfectSite,          // latching
  PropagateInfection,
  TakePrecautions,
  StartRecovery,
};

/// A switch is its kind plus the site or route it controls (0 for the
/// three global switches).
struct SwitchId {
  SwitchKind kind = SwitchKind::PropagateInfection;
  std::size_t index = 0;
  friend bool operator==(const SwitchId&, const SwitchId&) = default;
};

constexpr bool is_latching(SwitchKind kind) {
  return kind == SwitchKind::RouteEnable || kind == SwitchKind::InfectSite;
}

enum class SwitchOutcome {
  Accepted,
  UnknownSwitch,
  LatchingViolation,
  LockdownConflict,  // route unlock while an endpoint site is locked
};

constexpr std::string_view to_string(SwitchOutcome o) {
  switch (o) {
    case SwitchOutcome::Accepted: return "accepted";
    case SwitchOutcome::UnknownSwitch: return "unknown_switch";
    case SwitchOutcome::LatchingViolation: return "latching_violation";
    case SwitchOutcome::LockdownConflict: return "lockdown_conflict";
  }
  return "unknown_switch";
}

struct SwitchBoard {
  std::vector<bool> route_enable;
  std::vector<bool> route_lockdown;
  std::vector<bool> site_lockdown;
  std::vector<bool> local_mobility_allow;
  std::vector<bool> infect_site;
  bool propagate_infection = false;
  bool take_precautions = false;
  bool start_recovery = false;

  /// Initial board: local mobility allowed everywhere, everything else off.
  static SwitchBoard initial(std::size_t sites, std::size_t routes) {
    SwitchBoard b;
    b.route_enable.assign(routes, false);
    b.route_lockdown.assign(routes, false);
    b.site_lockdown.assign(sites, false);
    b.local_mobility_allow.assign(sites, true);
    b.infect_site.assign(sites, false);
    return b;
  }

  std::optional<bool> get(SwitchId id) const {
    const auto* v = vector_for(id.kind);
    if (v) {
      if (id.index >= v->size()) return std::nullopt;
      return (*v)[id.index];
    }
    if (id.index != 0) return std::nullopt;
    switch (id.kind) {
      case SwitchKind::PropagateInfection: return propagate_infection;
      case SwitchKind::TakePrecautions: return take_precautions;
      case SwitchKind::StartRecovery: return start_recovery;
      default: return std::nullopt;
    }
  }

  /// Applies one switch transition. The board is unchanged unless the
  /// outcome is Accepted. Locking a site also locks every incident route;
  /// unlocking a site leaves its routes locked.
  SwitchOutcome apply(const SimConfig& config, SwitchId id, bool value) {
    const auto current = get(id);
    if (!current) return SwitchOutcome::UnknownSwitch;
    if (is_latching(id.kind) && *current && !value) return SwitchOutcome::LatchingViolation;

    switch (id.kind) {
      case SwitchKind::RouteEnable: route_enable[id.index] = value; break;
      case SwitchKind::RouteLockdown: {
        if (!value) {
          const auto& r = config.routes[id.index];
          const auto a = find_site(config, r.a);
          const auto b = find_site(config, r.b);
          if ((a && site_lockdown[a->index]) || (b && site_lockdown[b->index])) {
            return SwitchOutcome::LockdownConflict;
          }
        }
        route_lockdown[id.index] = value;
        break;
      }
      case SwitchKind::SiteLockdown: {
        site_lockdown[id.index] = value;
        if (value) {
          const auto& name = config.sites[id.index].name;
          for (std::size_t r = 0; r < config.routes.size(); ++r) {
            if (config.routes[r].a == name || config.routes[r].b == name) {
              route_lockdown[r] = true;
            }
          }
        }
        break;
      }
      case SwitchKind::LocalMobilityAllow: local_mobility_allow[id.index] = value; break;
      case SwitchKind::InfectSite: infect_site[id.index] = value; break;
      case SwitchKind::PropagateInfection: propagate_infection = value; break;
      case SwitchKind::TakePrecautions: take_precautions = value; break;
      case SwitchKind::StartRecovery: start_recovery = value; break;
    }
    return SwitchOutcome::Accepted;
  }

  friend bool operator==(const SwitchBoard&, const SwitchBoard&) = default;

 private:
  const std::vector<bool>* vector_for(SwitchKind kind) const {
    switch (kind) {
      case SwitchKind::RouteEnable: return &route_enable;
      case SwitchKind::RouteLockdown: return &route_lockdown;
      case SwitchKind::SiteLockdown: return &site_lockdown;
      case SwitchKind::LocalMobilityAllow: return &local_mobility_allow;
      case SwitchKind::InfectSite: return &infect_site;
      default: return nullptr;
    }
  }
};

// Switch names follow the operator panel: "route-red-blue-enable",
// "lockdown-red-blue", "lockdown-red", "local-mobility-red-allow",
// "infect-red", "propagate-infection", "take-precautions", "start-recovery".
// A trailing '?' is accepted on input and route endpoints may be given in
// either order.

inline std::string switch_name(const SimConfig& config, SwitchId id) {
  switch (id.kind) {
    case SwitchKind::RouteEnable: return "route-" + route_name(config, RouteId{id.index}) + "-enable";
    case SwitchKind::RouteLockdown: return "lockdown-" + route_name(config, RouteId{id.index});
    case SwitchKind::SiteLockdown: return "lockdown-" + config.sites.at(id.index).name;
    case SwitchKind::LocalMobilityAllow:
      return "local-mobility-" + config.sites.at(id.index).name + "-allow";
    case SwitchKind::InfectSite: return "infect-" + config.sites.at(id.index).name;
    case SwitchKind::PropagateInfection: return "propagate-infection";
    case SwitchKind::TakePrecautions: return "take-precautions";
    case SwitchKind::StartRecovery: return "start-recovery";
  }
  return {};
}

/// Every switch of a world built from `config`, in panel order.
inline std::vector<SwitchId> all_switches(const SimConfig& config) {
  std::vector<SwitchId> out;
  const auto nr = config.routes.size();
  const auto ns = config.sites.size();
  for (std::size_t i = 0; i < nr; ++i) out.push_back({SwitchKind::RouteEnable, i});
  for (std::size_t i = 0; i < ns; ++i) out.push_back({SwitchKind::InfectSite, i});
  out.push_back({SwitchKind::PropagateInfection, 0});
  out.push_back({SwitchKind::TakePrecautions, 0});
  out.push_back({SwitchKind::StartRecovery, 0});
  for (std::size_t i = 0; i < ns; ++i) out.push_back({SwitchKind::SiteLockdown, i});
  for (std::size_t i = 0; i < ns; ++i) out.push_back({SwitchKind::LocalMobilityAllow, i});
  for (std::size_t i = 0; i < nr; ++i) out.push_back({SwitchKind::RouteLockdown, i});
  return out;
}

namespace detail {

// Splits "a-b" into a route between two known sites. Site names may
// themselves contain '-', so every split point is tried.
inline std::optional<RouteId> parse_route_pair(const SimConfig& config, std::string_view pair) {
  for (std::size_t pos = pair.find('-'); pos != std::string_view::npos;
       pos = pair.find('-', pos + 1)) {
    const auto a = pair.substr(0, pos);
    const auto b = pair.substr(pos + 1);
    if (find_site(config, a) && find_site(config, b)) {
      if (auto r = find_route(config, a, b)) return r;
    }
  }
  return std::nullopt;
}

inline bool strip_prefix(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  return true;
}

inline bool strip_suffix(std::string_view& s, std::string_view suffix) {
  if (s.size() < suffix.size() || s.substr(s.size() - suffix.size()) != suffix) return false;
  s.remove_suffix(suffix.size());
  return true;
}

}  // namespace detail

inline std::optional<SwitchId> parse_switch_name(const SimConfig& config, std::string_view name) {
  if (!name.empty() && name.back() == '?') name.remove_suffix(1);

  if (name == "propagate-infection") return SwitchId{SwitchKind::PropagateInfection, 0};
  if (name == "take-precautions") return SwitchId{SwitchKind::TakePrecautions, 0};
  if (name == "start-recovery") return SwitchId{SwitchKind::StartRecovery, 0};

  std::string_view rest = name;
  if (detail::strip_prefix(rest, "route-") && detail::strip_suffix(rest, "-enable")) {
    if (auto r = detail::parse_route_pair(config, rest)) return SwitchId{SwitchKind::RouteEnable, r->index};
    return std::nullopt;
  }
  rest = name;
  if (detail::strip_prefix(rest, "local-mobility-") && detail::strip_suffix(rest, "-allow")) {
    if (auto s = find_site(config, rest)) return SwitchId{SwitchKind::LocalMobilityAllow, s->index};
    return std::nullopt;
  }
  rest = name;
  if (detail::strip_prefix(rest, "infect-")) {
    if (auto s = find_site(config, rest)) return SwitchId{SwitchKind::InfectSite, s->index};
    return std::nullopt;
  }
  rest = name;
  if (detail::strip_prefix(rest, "lockdown-")) {
    if (auto s = find_site(config, rest)) return SwitchId{SwitchKind::SiteLockdown, s->index};
    if (auto r = detail::parse_route_pair(config, rest)) return SwitchId{SwitchKind::RouteLockdown, r->index};
  }
  return std::nullopt;
}

}  // namespace episim
