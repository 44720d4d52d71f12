#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace episim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline double distance2(Vec2 a, Vec2 b) { return (a - b).norm2(); }
inline double distance(Vec2 a, Vec2 b) { return std::sqrt(distance2(a, b)); }

/// Distance from p to the closed segment [a, b].
inline double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 == 0.0) {
    return distance(p, a);
  }
  const Vec2 ap = p - a;
  double t = (ap.x * ab.x + ap.y * ab.y) / len2;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return distance(p, a + t * ab);
}

/// Index of a site in the world's site table.
struct SiteId {
  std::size_t index = 0;
  friend auto operator<=>(const SiteId&, const SiteId&) = default;
};

/// Index of a route in the world's route table.
struct RouteId {
  std::size_t index = 0;
  friend auto operator<=>(const RouteId&, const RouteId&) = default;
};

/// Rendered as circle, triangle, square and star respectively.
enum class AgentState : std::uint8_t { Susceptible, Infected, Precaution, Recovered };

inline constexpr std::size_t kAgentStateCount = 4;

constexpr std::string_view to_string(AgentState s) {
  switch (s) {
    case AgentState::Susceptible: return "susceptible";
    case AgentState::Infected: return "infected";
    case AgentState::Precaution: return "precaution";
    case AgentState::Recovered: return "recovered";
  }
  return "susceptible";
}

constexpr std::optional<AgentState> agent_state_from_string(std::string_view s) {
  if (s == "susceptible") return AgentState::Susceptible;
  if (s == "infected") return AgentState::Infected;
  if (s == "precaution") return AgentState::Precaution;
  if (s == "recovered") return AgentState::Recovered;
  return std::nullopt;
}

/// A journey along one route toward one of its endpoints.
struct TransitPlan {
  RouteId route;
  SiteId destination;
  Vec2 direction;  // unit vector, fixed at departure

  friend bool operator==(const TransitPlan&, const TransitPlan&) = default;
};

struct Agent {
  std::uint32_t id = 0;
  SiteId home_site;
  SiteId site;  // site of residence; the origin while in transit
  std::optional<TransitPlan> transit;
  Vec2 position;
  AgentState state = AgentState::Susceptible;
  double immunity = 0.0;
  std::optional<SiteId> heading;

  bool in_transit() const { return transit.has_value(); }
  bool resident_of(SiteId s) const { return !transit && site == s; }
  bool precaution() const { return state == AgentState::Precaution; }
  bool infected() const { return state == AgentState::Infected; }

  friend bool operator==(const Agent&, const Agent&) = default;
};

}  // namespace episim
