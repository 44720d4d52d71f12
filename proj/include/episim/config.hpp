#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "episim/types.hpp"

namespace episim {

/// Closed integer interval [lo, hi]; a count is drawn uniformly from it.
struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// Real interval; a value is drawn uniformly from [lo, hi).
struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const RealRange&, const RealRange&) = default;
};

struct SiteSpec {
  std::string name;
  Vec2 center;
  double radius = 0.0;
  friend bool operator==(const SiteSpec&, const SiteSpec&) = default;
};

/// Unordered pair of site names. The listed order fixes the canonical
/// switch names ("route-<a>-<b>-enable", "lockdown-<a>-<b>").
struct RouteSpec {
  std::string a;
  std::string b;
  friend bool operator==(const RouteSpec&, const RouteSpec&) = default;
};

inline std::vector<SiteSpec> default_sites() {
  return {
      {"red", {50.0, 50.0}, 12.0},
      {"blue", {15.0, 15.0}, 12.0},
      {"pink", {85.0, 15.0}, 12.0},
      {"cyan", {85.0, 85.0}, 12.0},
      {"yellow", {15.0, 85.0}, 12.0},
  };
}

inline std::vector<RouteSpec> default_routes() {
  return {
      {"red", "blue"},   {"red", "pink"},  {"red", "cyan"},  {"red", "yellow"},
      {"blue", "yellow"}, {"blue", "pink"}, {"pink", "cyan"}, {"cyan", "yellow"},
  };
}

/// Every tunable of the model. Default-constructed values are the
/// documented defaults (500 agents over five sites and eight routes).
struct SimConfig {
  double world_width = 100.0;
  double world_height = 100.0;
  std::vector<SiteSpec> sites = default_sites();
  std::vector<RouteSpec> routes = default_routes();

  std::int64_t agents_per_site = 100;
  double local_step = 1.0;
  double transit_speed = 1.5;
  double infection_radius = 2.0;
  double base_infection_prob = 0.6;
  RealRange immunity_range{0.0, 0.5};

  IntRange seed_infect_range{5, 10};
  IntRange travel_batch_range{2, 8};
  std::int64_t travel_period = 20;
  IntRange precaution_per_tick_range{1, 3};
  IntRange recovery_per_tick_range{1, 3};

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

inline std::optional<SiteId> find_site(const SimConfig& config, std::string_view name) {
  for (std::size_t i = 0; i < config.sites.size(); ++i) {
    if (config.sites[i].name == name) {
      return SiteId{i};
    }
  }
  return std::nullopt;
}

inline std::string route_name(const RouteSpec& route) { return route.a + "-" + route.b; }

inline std::string route_name(const SimConfig& config, RouteId r) {
  return route_name(config.routes.at(r.index));
}

/// Route between two sites, in either order.
inline std::optional<RouteId> find_route(const SimConfig& config, std::string_view a,
                                         std::string_view b) {
  for (std::size_t i = 0; i < config.routes.size(); ++i) {
    const auto& r = config.routes[i];
    if ((r.a == a && r.b == b) || (r.a == b && r.b == a)) {
      return RouteId{i};
    }
  }
  return std::nullopt;
}

/// Lengths between site centers; the longest bounds the duration of any transit.
inline double max_route_length(const SimConfig& config) {
  double longest = 0.0;
  for (const auto& r : config.routes) {
    const auto a = find_site(config, r.a);
    const auto b = find_site(config, r.b);
    if (a && b) {
      const double d = distance(config.sites[a->index].center, config.sites[b->index].center);
      longest = d > longest ? d : longest;
    }
  }
  return longest;
}

}  // namespace episim
