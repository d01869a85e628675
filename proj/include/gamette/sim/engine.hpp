#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <variant>
#include <vector>

#include "gamette/sim/policies.hpp"
#include "gamette/sim/scenario.hpp"
#include "gamette/sim/types.hpp"

namespace gamette::sim {

struct AgentState {
  Units on_hand = 0;
  std::vector<Units> backlog;     // owed to each customer, indexed like Network::customers
  std::vector<Shipment> pipeline; // inbound units (production for manufacturers)
  Units outstanding = 0;          // ordered from the supplier, not yet shipped
  Ledger ledger;
  friend bool operator==(const AgentState&, const AgentState&) = default;
};

// Adjacency derived from the topology; indices refer to NetworkTopology::agents.
struct Network {
  std::vector<std::vector<std::size_t>> suppliers;
  std::vector<std::vector<std::size_t>> customers;
  friend bool operator==(const Network&, const Network&) = default;

  std::size_t customer_slot(std::size_t supplier, std::size_t customer) const {
    const auto& c = customers[supplier];
    return static_cast<std::size_t>(std::find(c.begin(), c.end(), customer) - c.begin());
  }
};

struct SimState {
  ScenarioConfig config;
  Network network;
  Week week = 0;  // next week to be simulated
  std::vector<AgentState> agents;
  std::vector<TrustState> trust;                // per agent; empty unless a trust-splitting health center
  std::vector<std::vector<double>> delivery_rate; // per wholesaler, per customer slot: last week's fill rate
  std::vector<PendingOrder> orders;             // orders travelling to suppliers
  friend bool operator==(const SimState&, const SimState&) = default;

  const AgentSpec& spec(std::size_t i) const { return config.topology.agents[i]; }
  std::optional<std::size_t> controlled() const {
    if (config.topology.controlled.empty()) return std::nullopt;
    return config.topology.index_of(config.topology.controlled);
  }
  std::size_t index(std::string_view id) const {
    auto i = config.topology.index_of(id);
    if (!i) throw std::out_of_range("unknown agent " + std::string(id));
    return *i;
  }

  // Zeroes all money ledgers; physical state is untouched.
  void reset_ledgers() {
    for (auto& a : agents) a.ledger = {};
  }
};

struct AgentWeek {
  Units inventory_before = 0;
  Units inventory_after = 0;
  Units receipts = 0;
  Units shipments = 0;  // units leaving on-hand stock
  Units demand = 0;     // new orders received this week
  Units sales = 0;      // units delivered to customers
  Units backlog_before = 0;
  Units backlog_after = 0;
  Units orders_placed = 0;  // to suppliers; production started for manufacturers
  Units suggestion = 0;
  Units capacity = 0;       // effective production capacity (manufacturers)
  std::vector<Units> shipped_to;   // per customer slot
  std::vector<Units> ordered_from; // per supplier slot
  Ledger delta;
  friend bool operator==(const AgentWeek&, const AgentWeek&) = default;
};

struct WeekReport {
  Week week = 0;
  std::vector<AgentWeek> agents;
  friend bool operator==(const WeekReport&, const WeekReport&) = default;

  // Equality of everything except the week index.
  bool same_flows(const WeekReport& o) const { return agents == o.agents; }
};

struct ManualAllocation {
  std::vector<Units> units;  // per customer slot
  friend bool operator==(const ManualAllocation&, const ManualAllocation&) = default;
};

using Allocation = std::variant<AllocationPolicy, ManualAllocation>;

struct ExternalDecision {
  Units order = 0;
  std::optional<Allocation> allocation;  // required only when stock is short
};

struct StepResult {
  SimState state;
  WeekReport report;
};

// What the controlled wholesaler sees before deciding.
struct StateView {
  Week week = 0;
  Units on_hand = 0;
  Units receipts = 0;
  std::vector<std::string> customers;
  std::vector<Units> demand;   // new orders per customer
  std::vector<Units> backlog;  // carried over per customer
  std::vector<Units> due;      // demand + backlog
  Units total_due = 0;
  bool needs_allocation = false;
  Units pipeline = 0;
  Units outstanding = 0;
  Units suggestion = 0;
  Ledger ledger;
  friend bool operator==(const StateView&, const StateView&) = default;
};

namespace detail {

inline Units sum(const std::vector<Units>& v) { return std::accumulate(v.begin(), v.end(), Units{0}); }

inline Units pipeline_units(const AgentState& a) {
  Units u = 0;
  for (const auto& s : a.pipeline) u += s.units;
  return u;
}

inline PositionInputs position_of(const AgentState& a) {
  return {a.on_hand, pipeline_units(a), a.outstanding, sum(a.backlog)};
}

inline Units effective_capacity(const SimState& s, std::size_t mn, Week w) {
  const auto& spec = s.spec(mn);
  double fraction = 1.0;
  for (const auto& d : s.config.disruptions)
    if (d.target == spec.id && d.active(w)) fraction = std::min(fraction, d.capacity_fraction);
  if (fraction >= 1.0) return spec.capacity;
  return static_cast<Units>(std::floor(static_cast<double>(spec.capacity) * fraction));
}

// Scratch kept between the observable half of a week and the decision half.
struct WeekScratch {
  WeekReport report;
  std::vector<std::vector<Units>> fresh;  // new orders per agent per customer slot
};

inline Network derive_network(const NetworkTopology& t) {
  Network n;
  n.suppliers.resize(t.agents.size());
  n.customers.resize(t.agents.size());
  for (const auto& l : t.links) {
    const auto s = *t.index_of(l.supplier);
    const auto c = *t.index_of(l.customer);
    n.customers[s].push_back(c);
    n.suppliers[c].push_back(s);
  }
  return n;
}

// Receipts, incoming orders, health-center orders and manufacturer shipping.
inline WeekScratch begin_week(SimState& s) {
  const Week w = s.week;
  const std::size_t n = s.agents.size();
  WeekScratch x;
  x.report.week = w;
  x.report.agents.resize(n);
  x.fresh.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    auto& a = s.agents[i];
    auto& r = x.report.agents[i];
    r.inventory_before = a.on_hand;
    r.backlog_before = sum(a.backlog);
    r.shipped_to.assign(s.network.customers[i].size(), 0);
    r.ordered_from.assign(s.network.suppliers[i].size(), 0);
    x.fresh[i].assign(s.network.customers[i].size(), 0);

    auto arrived = std::stable_partition(a.pipeline.begin(), a.pipeline.end(),
                                         [w](const Shipment& sh) { return sh.arrival != w; });
    for (auto it = arrived; it != a.pipeline.end(); ++it) r.receipts += it->units;
    a.pipeline.erase(arrived, a.pipeline.end());
    a.on_hand += r.receipts;
  }

  // Orders placed last week reach their supplier now.
  auto due_now = std::stable_partition(s.orders.begin(), s.orders.end(),
                                       [w](const PendingOrder& o) { return o.due != w; });
  for (auto it = due_now; it != s.orders.end(); ++it) {
    const auto slot = s.network.customer_slot(it->supplier, it->customer);
    s.agents[it->supplier].backlog[slot] += it->units;
    x.fresh[it->supplier][slot] += it->units;
    x.report.agents[it->supplier].demand += it->units;
  }
  s.orders.erase(due_now, s.orders.end());

  // Health centers pass their constant demand to wholesalers without delay.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& spec = s.spec(i);
    if (spec.role != Role::HealthCenter) continue;
    std::vector<Units> split;
    if (spec.split == SplitRule::Trust) {
      split = split_demand(spec.demand, SplitRule::Trust, s.trust[i]);
    } else {
      TrustState equal;
      equal.scores.assign(s.network.suppliers[i].size(), 1.0);
      split = split_demand(spec.demand, SplitRule::Equal, equal);
    }
    auto& r = x.report.agents[i];
    r.demand = spec.demand;
    for (std::size_t k = 0; k < split.size(); ++k) {
      const auto ws = s.network.suppliers[i][k];
      const auto slot = s.network.customer_slot(ws, i);
      s.agents[ws].backlog[slot] += split[k];
      x.fresh[ws][slot] += split[k];
      x.report.agents[ws].demand += split[k];
      r.ordered_from[k] = split[k];
      r.orders_placed += split[k];
    }
  }

  // Manufacturers ship what they can; units reach the wholesaler next week.
  for (std::size_t i = 0; i < n; ++i) {
    if (s.spec(i).role != Role::Manufacturer) continue;
    auto& a = s.agents[i];
    auto& r = x.report.agents[i];
    const auto shipped = allocate(a.on_hand, a.backlog, s.spec(i).allocation);
    for (std::size_t k = 0; k < shipped.size(); ++k) {
      if (shipped[k] == 0) continue;
      const auto ws = s.network.customers[i][k];
      a.backlog[k] -= shipped[k];
      a.on_hand -= shipped[k];
      s.agents[ws].outstanding -= shipped[k];
      s.agents[ws].pipeline.push_back({w + 1, shipped[k], ws});
      r.shipped_to[k] = shipped[k];
      r.shipments += shipped[k];
      r.sales += shipped[k];
    }
  }
  return x;
}

inline StateView view_of(const SimState& s, const WeekScratch& x, std::size_t ws) {
  StateView v;
  v.week = s.week;
  const auto& a = s.agents[ws];
  v.on_hand = a.on_hand;
  v.receipts = x.report.agents[ws].receipts;
  for (std::size_t k = 0; k < s.network.customers[ws].size(); ++k) {
    v.customers.push_back(s.spec(s.network.customers[ws][k]).id);
    v.demand.push_back(x.fresh[ws][k]);
    v.due.push_back(a.backlog[k]);
    v.backlog.push_back(a.backlog[k] - x.fresh[ws][k]);
  }
  v.total_due = sum(v.due);
  v.needs_allocation = a.on_hand < v.total_due;
  v.pipeline = pipeline_units(a);
  v.outstanding = a.outstanding;
  v.suggestion = order_up_to_suggestion(position_of(a), s.spec(ws).order_up_to);
  v.ledger = a.ledger;
  return v;
}

inline std::vector<Units> resolve_allocation(const SimState& s, std::size_t ws, const Allocation& alloc) {
  const auto& a = s.agents[ws];
  if (const auto* policy = std::get_if<AllocationPolicy>(&alloc)) return allocate(a.on_hand, a.backlog, *policy);
  const auto& manual = std::get<ManualAllocation>(alloc).units;
  if (manual.size() != a.backlog.size()) throw StepError("allocation must name every customer");
  Units total = 0;
  for (std::size_t k = 0; k < manual.size(); ++k) {
    if (manual[k] < 0) throw StepError("negative allocation");
    if (manual[k] > a.backlog[k]) throw StepError("allocation exceeds the customer's demand");
    total += manual[k];
  }
  if (total > a.on_hand) throw StepError("allocation exceeds on-hand inventory");
  if (total != std::min(a.on_hand, sum(a.backlog))) throw StepError("allocation leaves stock unshipped");
  return manual;
}

inline WeekReport finish_week(SimState& s, WeekScratch&& x, const std::optional<ExternalDecision>& external) {
  const Week w = s.week;
  const std::size_t n = s.agents.size();
  const auto controlled = s.controlled();
  if (controlled.has_value() != external.has_value())
    throw StepError(controlled ? "missing external decision for " + s.spec(*controlled).id
                               : std::string("external decision given but no agent is externally controlled"));
  if (external && external->order < 0) throw StepError("negative order");

  // Wholesalers ship to health centers; delivery is immediate.
  std::vector<std::vector<double>> fill(n);  // per health center, per supplier slot
  for (std::size_t i = 0; i < n; ++i) fill[i].assign(s.network.suppliers[i].size(), 1.0);

  for (std::size_t i = 0; i < n; ++i) {
    if (s.spec(i).role != Role::Wholesaler) continue;
    auto& a = s.agents[i];
    auto& r = x.report.agents[i];
    const Units total_due = sum(a.backlog);
    std::vector<Units> shipped;
    if (a.on_hand >= total_due) {
      shipped = a.backlog;
    } else if (controlled && *controlled == i) {
      if (!external->allocation) throw StepError("allocation decision required: on-hand below demand");
      shipped = resolve_allocation(s, i, *external->allocation);
    } else {
      shipped = allocate(a.on_hand, a.backlog, s.spec(i).allocation);
    }
    s.delivery_rate[i].assign(shipped.size(), 1.0);
    for (std::size_t k = 0; k < shipped.size(); ++k) {
      const auto hc = s.network.customers[i][k];
      const Units due = a.backlog[k];
      const double rate = due > 0 ? static_cast<double>(shipped[k]) / static_cast<double>(due) : 1.0;
      s.delivery_rate[i][k] = rate;
      const auto supplier_slot = static_cast<std::size_t>(
          std::find(s.network.suppliers[hc].begin(), s.network.suppliers[hc].end(), i) - s.network.suppliers[hc].begin());
      fill[hc][supplier_slot] = rate;
      a.backlog[k] -= shipped[k];
      a.on_hand -= shipped[k];
      r.shipped_to[k] = shipped[k];
      r.shipments += shipped[k];
      r.sales += shipped[k];
      auto& hr = x.report.agents[hc];
      hr.receipts += shipped[k];
      hr.shipments += shipped[k];  // consumed by patients
      hr.sales += shipped[k];
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    if (s.spec(i).role == Role::HealthCenter && s.spec(i).split == SplitRule::Trust)
      s.trust[i] = trust_update(s.trust[i], fill[i]);

  // Wholesaler replenishment orders reach the manufacturer next week.
  for (std::size_t i = 0; i < n; ++i) {
    if (s.spec(i).role != Role::Wholesaler) continue;
    auto& a = s.agents[i];
    auto& r = x.report.agents[i];
    r.suggestion = order_up_to_suggestion(position_of(a), s.spec(i).order_up_to);
    const Units order = (controlled && *controlled == i) ? external->order : r.suggestion;
    if (order > 0) {
      const auto mn = s.network.suppliers[i].front();
      s.orders.push_back({w + 1, mn, i, order});
      a.outstanding += order;
    }
    r.orders_placed = order;
    r.ordered_from.assign(1, order);
  }

  // Manufacturers start production up to the effective capacity.
  for (std::size_t i = 0; i < n; ++i) {
    if (s.spec(i).role != Role::Manufacturer) continue;
    auto& a = s.agents[i];
    auto& r = x.report.agents[i];
    r.suggestion = order_up_to_suggestion(position_of(a), s.spec(i).order_up_to);
    r.capacity = effective_capacity(s, i, w);
    const Units produce = std::min(r.suggestion, r.capacity);
    if (produce > 0) a.pipeline.push_back({w + s.config.production_lead_time, produce, i});
    r.orders_placed = produce;
  }

  const auto& costs = s.config.costs;
  for (std::size_t i = 0; i < n; ++i) {
    auto& a = s.agents[i];
    auto& r = x.report.agents[i];
    r.inventory_after = a.on_hand;
    r.backlog_after = sum(a.backlog);
    if (s.spec(i).role != Role::HealthCenter) {
      r.delta.revenue = costs.revenue * static_cast<Money>(r.sales);
      r.delta.holding_cost = costs.holding * static_cast<Money>(a.on_hand);
      r.delta.stockout_cost = costs.stockout * static_cast<Money>(r.backlog_after);
      a.ledger += r.delta;
    }
  }
  s.week = w + 1;
  return std::move(x.report);
}

}  // namespace detail

// Builds the initial state at the scenario's start week in steady state:
// zero backlog, pipelines primed with the flows implied by equal splitting.
inline SimState build_network(const ScenarioConfig& config) {
  validate(config);
  SimState s;
  s.config = config;
  s.network = detail::derive_network(config.topology);
  s.week = config.start_week;
  const std::size_t n = config.topology.agents.size();
  s.agents.resize(n);
  s.trust.resize(n);
  s.delivery_rate.resize(n);

  std::vector<Units> flow(n, 0);  // steady weekly throughput per agent
  for (std::size_t i = 0; i < n; ++i) {
    const auto& spec = s.spec(i);
    if (spec.role != Role::HealthCenter) continue;
    TrustState equal;
    equal.scores.assign(s.network.suppliers[i].size(), 1.0);
    const auto split = split_demand(spec.demand, SplitRule::Equal, equal);
    for (std::size_t k = 0; k < split.size(); ++k) flow[s.network.suppliers[i][k]] += split[k];
    if (spec.split == SplitRule::Trust) {
      s.trust[i].scores.assign(s.network.suppliers[i].size(), 1.0);
      s.trust[i].smoothing = config.trust.smoothing;
      s.trust[i].floor = config.trust.floor;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (s.spec(i).role == Role::Wholesaler) flow[s.network.suppliers[i].front()] += flow[i];

  // Health-center splits must be reproducible from the trust start point.
  for (std::size_t i = 0; i < n; ++i) {
    if (s.spec(i).role == Role::HealthCenter && s.spec(i).split == SplitRule::Trust) {
      const auto a = split_demand(s.spec(i).demand, SplitRule::Trust, s.trust[i]);
      TrustState equal;
      equal.scores.assign(a.size(), 1.0);
      if (a != split_demand(s.spec(i).demand, SplitRule::Equal, equal))
        throw ConfigError("trust split of " + s.spec(i).id + " is not symmetric at start");
    }
  }

  const Week w0 = config.start_week;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& spec = s.spec(i);
    auto& a = s.agents[i];
    a.backlog.assign(s.network.customers[i].size(), 0);
    s.delivery_rate[i].assign(s.network.customers[i].size(), 1.0);
    if (spec.role == Role::Wholesaler) {
      const Units d = flow[i];
      a.on_hand = spec.order_up_to - 2 * d;
      if (a.on_hand < 0) throw ConfigError("order-up-to level of " + spec.id + " below its steady pipeline");
      if (d > 0) {
        a.pipeline.push_back({w0, d, i});
        a.outstanding = d;
        s.orders.push_back({w0, s.network.suppliers[i].front(), i, d});
      }
    } else if (spec.role == Role::Manufacturer) {
      const Units d = flow[i];
      a.on_hand = spec.order_up_to - config.production_lead_time * d;
      if (a.on_hand < 0) throw ConfigError("order-up-to level of " + spec.id + " below its steady pipeline");
      if (d > spec.capacity) throw ConfigError("baseline capacity of " + spec.id + " below steady demand");
      if (d > 0)
        for (Week k = 0; k < config.production_lead_time; ++k) a.pipeline.push_back({w0 + k, d, i});
    }
  }
  return s;
}

// Advances one week. `external` must be present iff an agent is externally controlled.
inline StepResult step(SimState state, const std::optional<ExternalDecision>& external) {
  auto scratch = detail::begin_week(state);
  auto report = detail::finish_week(state, std::move(scratch), external);
  return {std::move(state), std::move(report)};
}

// In-place variant for long runs.
inline WeekReport step_in_place(SimState& state, const std::optional<ExternalDecision>& external) {
  SimState next = state;
  auto scratch = detail::begin_week(next);
  auto report = detail::finish_week(next, std::move(scratch), external);
  state = std::move(next);
  return report;
}

// The controlled (or named) wholesaler's view of the coming week, after
// receipts and incoming orders but before any decision.
inline StateView observe(const SimState& state, std::optional<std::size_t> agent = std::nullopt) {
  const auto who = agent ? agent : state.controlled();
  if (!who || state.spec(*who).role != Role::Wholesaler) throw StepError("observe: no wholesaler to observe");
  SimState copy = state;
  auto scratch = detail::begin_week(copy);
  return detail::view_of(copy, scratch, *who);
}

// Copy of the config with no externally controlled agent.
inline ScenarioConfig standalone(ScenarioConfig config) {
  config.topology.controlled.clear();
  return config;
}

}  // namespace gamette::sim
