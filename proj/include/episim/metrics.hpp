#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "episim/error.hpp"
#include "episim/world.hpp"

namespace episim {

struct MetricsSample {
  std::uint64_t tick = 0;
  std::uint64_t susceptible = 0;
  std::uint64_t infected = 0;
  std::uint64_t precaution = 0;
  std::uint64_t recovered = 0;
  double pct_infected = 0.0;
  double pct_precaution = 0.0;
  double pct_recovered = 0.0;

  std::uint64_t total() const { return susceptible + infected + precaution + recovered; }
  double pct_susceptible() const { return percent(susceptible); }
  /// Infected now plus already recovered.
  std::uint64_t ever_infected() const { return infected + recovered; }

  double percent(std::uint64_t count) const {
    const auto n = total();
    return n == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(n);
  }

  friend bool operator==(const MetricsSample&, const MetricsSample&) = default;
};

using MetricsSeries = std::vector<MetricsSample>;

inline MetricsSample compute_metrics(const WorldState& state) {
  MetricsSample m;
  m.tick = state.tick;
  for (const auto& a : state.agents) {
    switch (a.state) {
      case AgentState::Susceptible: ++m.susceptible; break;
      case AgentState::Infected: ++m.infected; break;
      case AgentState::Precaution: ++m.precaution; break;
      case AgentState::Recovered: ++m.recovered; break;
    }
  }
  m.pct_infected = m.percent(m.infected);
  m.pct_precaution = m.percent(m.precaution);
  m.pct_recovered = m.percent(m.recovered);
  return m;
}

inline constexpr std::string_view kMetricsCsvHeader =
    "tick,susceptible,infected,precaution,recovered,pct_infected,pct_precaution,pct_recovered";

inline std::string to_csv_row(const MetricsSample& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%llu,%llu,%llu,%llu,%llu,%.4f,%.4f,%.4f",
                static_cast<unsigned long long>(m.tick),
                static_cast<unsigned long long>(m.susceptible),
                static_cast<unsigned long long>(m.infected),
                static_cast<unsigned long long>(m.precaution),
                static_cast<unsigned long long>(m.recovered), m.pct_infected, m.pct_precaution,
                m.pct_recovered);
  return buf;
}

inline std::string export_csv(const MetricsSeries& series) {
  std::string out(kMetricsCsvHeader);
  out += '\n';
  for (const auto& m : series) {
    out += to_csv_row(m);
    out += '\n';
  }
  return out;
}

inline void export_csv(const MetricsSeries& series, std::ostream& os) {
  const auto text = export_csv(series);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw Error(ErrorCode::Io, "failed writing metrics CSV");
}

inline void to_json(nlohmann::json& j, const MetricsSample& m) {
  j = nlohmann::json{{"tick", m.tick},
                     {"susceptible", m.susceptible},
                     {"infected", m.infected},
                     {"precaution", m.precaution},
                     {"recovered", m.recovered},
                     {"pct_infected", m.pct_infected},
                     {"pct_precaution", m.pct_precaution},
                     {"pct_recovered", m.pct_recovered}};
}

inline void from_json(const nlohmann::json& j, MetricsSample& m) {
  j.at("tick").get_to(m.tick);
  j.at("susceptible").get_to(m.susceptible);
  j.at("infected").get_to(m.infected);
  j.at("precaution").get_to(m.precaution);
  j.at("recovered").get_to(m.recovered);
  j.at("pct_infected").get_to(m.pct_infected);
  j.at("pct_precaution").get_to(m.pct_precaution);
  j.at("pct_recovered").get_to(m.pct_recovered);
}

inline std::string export_json(const MetricsSeries& series) {
  return nlohmann::json(series).dump();
}

inline void export_json(const MetricsSeries& series, std::ostream& os) {
  const auto text = export_json(series);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw Error(ErrorCode::Io, "failed writing metrics JSON");
}

inline MetricsSeries parse_metrics_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text).get<MetricsSeries>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SyntaxError, std::string("metrics JSON: ") + e.what());
  }
}

}  // namespace episim
