#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gamette/sim/types.hpp"

namespace gamette::sim {

inline constexpr int kScenarioSchemaVersion = 1;

struct AgentSpec {
  std::string id;
  Role role = Role::Wholesaler;
  Units order_up_to = 0;  // S-level (manufacturers and wholesalers)
  Units demand = 0;       // constant end-customer demand (health centers)
  Units capacity = 0;     // baseline production per week (manufacturers)
  SplitRule split = SplitRule::Equal;
  AllocationPolicy allocation = AllocationPolicy::Proportional;
  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

struct Link {
  std::string supplier;
  std::string customer;
  friend bool operator==(const Link&, const Link&) = default;
};

struct NetworkTopology {
  std::vector<AgentSpec> agents;
  std::vector<Link> links;
  std::string controlled;  // agent driven by external decisions; empty for none

  std::optional<std::size_t> index_of(std::string_view id) const {
    for (std::size_t i = 0; i < agents.size(); ++i)
      if (agents[i].id == id) return i;
    return std::nullopt;
  }
  friend bool operator==(const NetworkTopology&, const NetworkTopology&) = default;
};

struct CostParams {
  Money holding = 1.0;   // per unit on hand per week
  Money stockout = 10.0; // per backlogged unit per week
  Money revenue = 5.0;   // per unit shipped to a customer
  friend bool operator==(const CostParams&, const CostParams&) = default;
};

struct TrustParams {
  double smoothing = 0.2;
  double floor = 0.05;
  friend bool operator==(const TrustParams&, const TrustParams&) = default;
};

struct DisruptionEvent {
  std::string target;
  Week start = 0;
  Week end = 0;  // inclusive
  double capacity_fraction = 0.05;

  bool active(Week w) const { return w >= start && w <= end; }
  friend bool operator==(const DisruptionEvent&, const DisruptionEvent&) = default;
};

struct ScenarioConfig {
  int schema_version = kScenarioSchemaVersion;
  NetworkTopology topology;
  Week start_week = 17;
  Week production_lead_time = 1;
  CostParams costs;
  TrustParams trust;
  std::vector<DisruptionEvent> disruptions;
  std::uint64_t seed = 0;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Two manufacturers, two wholesalers, two health centers. Each wholesaler
// buys from one manufacturer; both health centers buy from both wholesalers.
inline NetworkTopology standard_topology() {
  NetworkTopology t;
  t.agents = {
      {"MN1", Role::Manufacturer, 200, 0, 150, SplitRule::Equal, AllocationPolicy::Proportional},
      {"MN2", Role::Manufacturer, 200, 0, 150, SplitRule::Equal, AllocationPolicy::Proportional},
      {"WS1", Role::Wholesaler, 300, 0, 0, SplitRule::Equal, AllocationPolicy::Proportional},
      {"WS2", Role::Wholesaler, 300, 0, 0, SplitRule::Equal, AllocationPolicy::Proportional},
      {"HC1", Role::HealthCenter, 0, 100, 0, SplitRule::Trust, AllocationPolicy::Proportional},
      {"HC2", Role::HealthCenter, 0, 100, 0, SplitRule::Equal, AllocationPolicy::Proportional},
  };
  t.links = {{"MN1", "WS1"}, {"MN2", "WS2"}, {"WS1", "HC1"}, {"WS1", "HC2"}, {"WS2", "HC1"}, {"WS2", "HC2"}};
  t.controlled = "WS1";
  return t;
}

inline ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.topology = standard_topology();
  return c;
}

// Shutdown of `target` over the experiment's disruption window.
inline DisruptionEvent standard_disruption(std::string target) {
  return DisruptionEvent{std::move(target), 28, 33, 0.05};
}

// ---------------------------------------------------------------------------
// Validation

inline void validate(const ScenarioConfig& c) {
  if (c.schema_version != kScenarioSchemaVersion)
    throw ConfigError("unsupported scenario schema_version " + std::to_string(c.schema_version));
  const auto& t = c.topology;
  if (t.agents.empty()) throw ConfigError("topology has no agents");

  std::set<std::string> ids;
  for (const auto& a : t.agents) {
    if (a.id.empty()) throw ConfigError("agent with empty id");
    if (!ids.insert(a.id).second) throw ConfigError("duplicate agent id " + a.id);
    if (a.order_up_to < 0 || a.demand < 0 || a.capacity < 0)
      throw ConfigError("negative parameter on agent " + a.id);
  }

  const std::size_t n = t.agents.size();
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> supplier_count(n, 0);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& l : t.links) {
    auto s = t.index_of(l.supplier);
    auto k = t.index_of(l.customer);
    if (!s || !k) throw ConfigError("link references unknown agent " + l.supplier + "->" + l.customer);
    if (*s == *k) throw ConfigError("self link on " + l.supplier);
    if (!seen.insert({*s, *k}).second) throw ConfigError("duplicate link " + l.supplier + "->" + l.customer);
    succ[*s].push_back(*k);
    supplier_count[*k] += 1;
  }

  // Cycles are reported before the echelon check so the message names them.
  std::vector<int> mark(n, 0);
  auto dfs = [&](auto&& self, std::size_t u) -> void {
    mark[u] = 1;
    for (std::size_t v : succ[u]) {
      if (mark[v] == 1) throw ConfigError("topology contains a cycle through " + t.agents[v].id);
      if (mark[v] == 0) self(self, v);
    }
    mark[u] = 2;
  };
  for (std::size_t i = 0; i < n; ++i)
    if (mark[i] == 0) dfs(dfs, i);

  for (const auto& l : t.links) {
    const Role rs = t.agents[*t.index_of(l.supplier)].role, rk = t.agents[*t.index_of(l.customer)].role;
    const bool ok = (rs == Role::Manufacturer && rk == Role::Wholesaler) ||
                    (rs == Role::Wholesaler && rk == Role::HealthCenter);
    if (!ok) throw ConfigError("link " + l.supplier + "->" + l.customer + " does not follow the echelon order");
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = t.agents[i];
    if (a.role != Role::Manufacturer && supplier_count[i] == 0)
      throw ConfigError("agent " + a.id + " has no supplier");
    if (a.role == Role::Wholesaler && supplier_count[i] != 1)
      throw ConfigError("wholesaler " + a.id + " must have exactly one supplier");
    if (a.role == Role::HealthCenter && !succ[i].empty())
      throw ConfigError("health center " + a.id + " cannot supply other agents");
  }

  if (!t.controlled.empty()) {
    auto ci = t.index_of(t.controlled);
    if (!ci) throw ConfigError("controlled agent " + t.controlled + " not in topology");
    if (t.agents[*ci].role != Role::Wholesaler) throw ConfigError("only a wholesaler can be externally controlled");
  }

  if (c.production_lead_time < 1) throw ConfigError("production_lead_time must be >= 1");
  if (c.costs.holding < 0 || c.costs.stockout < 0 || c.costs.revenue < 0)
    throw ConfigError("negative cost parameter");
  if (!(c.costs.stockout > c.costs.holding) && (c.costs.stockout != 0 || c.costs.holding != 0))
    throw ConfigError("stockout cost must exceed holding cost");
  if (!(c.trust.smoothing > 0.0 && c.trust.smoothing < 1.0)) throw ConfigError("trust smoothing must be in (0,1)");
  if (!(c.trust.floor >= 0.0 && c.trust.floor <= 1.0)) throw ConfigError("trust floor must be in [0,1]");

  for (const auto& d : c.disruptions) {
    auto di = t.index_of(d.target);
    if (!di || t.agents[*di].role != Role::Manufacturer)
      throw ConfigError("disruption target " + d.target + " is not a manufacturer");
    if (d.start > d.end) throw ConfigError("disruption start after end");
    if (!(d.capacity_fraction >= 0.0 && d.capacity_fraction <= 1.0))
      throw ConfigError("disruption capacity fraction outside [0,1]");
  }
}

// ---------------------------------------------------------------------------
// JSON (versioned scenario file)

inline nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["schema_version"] = c.schema_version;
  j["start_week"] = c.start_week;
  j["production_lead_time"] = c.production_lead_time;
  j["seed"] = c.seed;
  auto& agents = j["agents"] = nlohmann::ordered_json::array();
  for (const auto& a : c.topology.agents) {
    nlohmann::ordered_json ja;
    ja["id"] = a.id;
    ja["role"] = std::string(to_string(a.role));
    switch (a.role) {
      case Role::Manufacturer:
        ja["order_up_to"] = a.order_up_to;
        ja["capacity"] = a.capacity;
        break;
      case Role::Wholesaler:
        ja["order_up_to"] = a.order_up_to;
        ja["allocation"] = std::string(to_string(a.allocation));
        break;
      case Role::HealthCenter:
        ja["demand"] = a.demand;
        ja["split"] = std::string(to_string(a.split));
        break;
    }
    agents.push_back(std::move(ja));
  }
  auto& links = j["links"] = nlohmann::ordered_json::array();
  for (const auto& l : c.topology.links) links.push_back({l.supplier, l.customer});
  j["controlled"] = c.topology.controlled;
  j["costs"] = {{"holding", c.costs.holding}, {"stockout", c.costs.stockout}, {"revenue", c.costs.revenue}};
  j["trust"] = {{"smoothing", c.trust.smoothing}, {"floor", c.trust.floor}};
  auto& dis = j["disruptions"] = nlohmann::ordered_json::array();
  for (const auto& d : c.disruptions)
    dis.push_back({{"target", d.target}, {"start", d.start}, {"end", d.end}, {"capacity_fraction", d.capacity_fraction}});
  return j;
}

template <typename Json>
ScenarioConfig scenario_from_json(const Json& j) {
  try {
    ScenarioConfig c;
    c.schema_version = j.at("schema_version").template get<int>();
    if (c.schema_version != kScenarioSchemaVersion)
      throw ConfigError("unsupported scenario schema_version " + std::to_string(c.schema_version));
    c.start_week = j.value("start_week", c.start_week);
    c.production_lead_time = j.value("production_lead_time", c.production_lead_time);
    c.seed = j.value("seed", c.seed);
    if (j.contains("agents")) {
      c.topology.agents.clear();
      for (const auto& ja : j.at("agents")) {
        AgentSpec a;
        a.id = ja.at("id").template get<std::string>();
        auto role = parse_role(ja.at("role").template get<std::string>());
        if (!role) throw ConfigError("unknown role for agent " + a.id);
        a.role = *role;
        a.order_up_to = ja.value("order_up_to", Units{0});
        a.demand = ja.value("demand", Units{0});
        a.capacity = ja.value("capacity", Units{0});
        auto split = parse_split_rule(ja.value("split", std::string("equal")));
        if (!split) throw ConfigError("unknown split rule for agent " + a.id);
        a.split = *split;
        auto alloc = parse_allocation_policy(ja.value("allocation", std::string("proportional")));
        if (!alloc) throw ConfigError("unknown allocation policy for agent " + a.id);
        a.allocation = *alloc;
        c.topology.agents.push_back(std::move(a));
      }
      for (const auto& jl : j.at("links")) {
        c.topology.links.push_back({jl.at(0).template get<std::string>(), jl.at(1).template get<std::string>()});
      }
      c.topology.controlled = j.value("controlled", std::string{});
    } else {
      c.topology = standard_topology();
      if (j.contains("controlled")) c.topology.controlled = j.at("controlled").template get<std::string>();
    }
    if (j.contains("costs")) {
      const auto& jc = j.at("costs");
      c.costs.holding = jc.value("holding", c.costs.holding);
      c.costs.stockout = jc.value("stockout", c.costs.stockout);
      c.costs.revenue = jc.value("revenue", c.costs.revenue);
    }
    if (j.contains("trust")) {
      c.trust.smoothing = j.at("trust").value("smoothing", c.trust.smoothing);
      c.trust.floor = j.at("trust").value("floor", c.trust.floor);
    }
    if (j.contains("disruptions")) {
      for (const auto& jd : j.at("disruptions")) {
        c.disruptions.push_back({jd.at("target").template get<std::string>(), jd.at("start").template get<Week>(),
                                 jd.at("end").template get<Week>(), jd.value("capacity_fraction", 0.05)});
      }
    }
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario parse failure: ") + e.what());
  }
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario parse failure in " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace gamette::sim
