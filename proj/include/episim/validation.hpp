#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "episim/config.hpp"

namespace episim {

struct Violation {
  std::string field;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

inline void check_range(std::vector<Violation>& out, const char* field, const IntRange& r) {
  if (r.lo < 0 || r.hi < 0) {
    out.push_back({field, "range bounds must be non-negative"});
  }
  if (r.lo > r.hi) {
    out.push_back({field, "range is empty (lo > hi)"});
  }
}

inline bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace detail

/// Checks geometry, route endpoints, ranges and probabilities.
/// An empty result means the config is valid.
inline std::vector<Violation> validate_world(const SimConfig& config) {
  std::vector<Violation> out;

  if (!(config.world_width > 0.0)) out.push_back({"world_width", "must be > 0"});
  if (!(config.world_height > 0.0)) out.push_back({"world_height", "must be > 0"});

  std::set<std::string> names;
  for (std::size_t i = 0; i < config.sites.size(); ++i) {
    const auto& s = config.sites[i];
    const std::string field = "sites[" + std::to_string(i) + "]";
    if (s.name.empty()) {
      out.push_back({field, "site name must not be empty"});
    } else if (!names.insert(s.name).second) {
      out.push_back({field, "duplicate site name '" + s.name + "'"});
    }
    if (!(s.radius > 0.0)) {
      out.push_back({field, "site '" + s.name + "' radius must be > 0"});
    }
    for (std::size_t j = 0; j < i; ++j) {
      const auto& o = config.sites[j];
      if (distance(s.center, o.center) <= s.radius + o.radius) {
        out.push_back({field, "site '" + s.name + "' overlaps site '" + o.name + "'"});
      }
    }
  }

  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < config.routes.size(); ++i) {
    const auto& r = config.routes[i];
    const std::string field = "routes[" + std::to_string(i) + "]";
    const std::string name = route_name(r);
    if (!find_site(config, r.a)) {
      out.push_back({field, "route '" + name + "' references unknown site '" + r.a + "'"});
    }
    if (!find_site(config, r.b)) {
      out.push_back({field, "route '" + name + "' references unknown site '" + r.b + "'"});
    }
    if (r.a == r.b) {
      out.push_back({field, "route '" + name + "' endpoints must be distinct"});
    }
    auto key = r.a < r.b ? std::pair{r.a, r.b} : std::pair{r.b, r.a};
    if (!seen.insert(key).second) {
      out.push_back({field, "duplicate route '" + name + "'"});
    }
  }

  if (config.agents_per_site < 0) out.push_back({"agents_per_site", "must be >= 0"});
  if (!(config.local_step >= 0.0)) out.push_back({"local_step", "must be >= 0"});
  if (!(config.transit_speed > 0.0)) out.push_back({"transit_speed", "must be > 0"});
  if (!(config.infection_radius > 0.0)) out.push_back({"infection_radius", "must be > 0"});
  if (!detail::is_probability(config.base_infection_prob)) {
    out.push_back({"base_infection_prob", "must be a probability in [0, 1]"});
  }
  const auto& im = config.immunity_range;
  if (!detail::is_probability(im.lo) || !detail::is_probability(im.hi) || im.lo > im.hi) {
    out.push_back({"immunity_range", "must satisfy 0 <= lo <= hi <= 1"});
  }
  detail::check_range(out, "seed_infect_range", config.seed_infect_range);
  detail::check_range(out, "travel_batch_range", config.travel_batch_range);
  detail::check_range(out, "precaution_per_tick_range", config.precaution_per_tick_range);
  detail::check_range(out, "recovery_per_tick_range", config.recovery_per_tick_range);
  if (config.travel_period <= 0) out.push_back({"travel_period", "must be > 0"});

  return out;
}

}  // namespace episim
