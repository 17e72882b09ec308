#include <map>

#include "lpbound/bounds.hpp"

namespace lpbound {

namespace {

struct Edge {
  VarSet from;
  VarSet to;
  std::vector<std::pair<int, double>> capacity;  // (statistic, coefficient)
  bool backward = false;
};

// Forward edges carry the statistics' weights; backward edges split a set into its members.
std::vector<Edge> flow_edges(const std::vector<StatConstraint>& stats) {
  std::map<std::pair<VarSet, VarSet>, Edge> edges;
  auto forward = [&](VarSet a, VarSet b, int k, double coef) {
    auto& e = edges[{a, b}];
    e.from = a;
    e.to = b;
    e.capacity.emplace_back(k, coef);
  };
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto& s = stats[k];
    const int ki = static_cast<int>(k);
    if (s.u.empty()) {
      forward(VarSet{}, s.uv, ki, 1.0);
    } else {
      if (!s.p.is_infinite()) forward(VarSet{}, s.u, ki, s.p.inverse());
      if (s.u != s.uv) forward(s.u, s.uv, ki, 1.0);
    }
    for (VarSet set : {s.u, s.uv}) {
      if (set.size() < 2) continue;
      for (int i : set.indices()) {
        auto& e = edges[{set, VarSet::singleton(i)}];
        e.from = set;
        e.to = VarSet::singleton(i);
        e.backward = true;
      }
    }
  }
  std::vector<Edge> out;
  for (auto& [_, e] : edges) out.push_back(std::move(e));
  return out;
}

}  // namespace

VarSet uncovered_variables(const QueryShape& q, const std::vector<StatConstraint>& stats) {
  const auto edges = flow_edges(stats);
  std::map<VarSet, bool> reached{{VarSet{}, true}};
  VarSet singles;
  auto reach = [&](VarSet s) {
    if (reached[s]) return false;
    reached[s] = true;
    if (s.size() == 1) singles |= s;
    return true;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : edges) {
      // A set is also reached once all of its members are.
      if (reached[e.from] || (e.from.size() >= 2 && e.from.subset_of(singles))) {
        changed = reach(e.from) || changed;
        changed = reach(e.to) || changed;
      }
    }
  }
  VarSet missing;
  for (int i : q.groupby.indices())
    if (!reached[VarSet::singleton(i)]) missing |= VarSet::singleton(i);
  return missing;
}

BoundLp build_lp_flow(const QueryShape& q, const std::vector<StatConstraint>& stats) {
  for (const auto& s : stats)
    if (s.u.size() > 1) throw BoundError("LP_flow requires simple statistics");
  BoundLp b;
  b.method = Method::flow;
  b.lp = LinearProgram(Sense::minimize);
  b.stat_index.assign(stats.size(), -1);
  for (std::size_t k = 0; k < stats.size(); ++k) {
    b.stat_index[k] = b.lp.add_variable("w" + std::to_string(k));
    b.lp.add_objective(b.stat_index[k], stats[k].log2_value);
  }
  const auto edges = flow_edges(stats);

  std::map<VarSet, int> node;
  auto node_of = [&](VarSet s) { return node.try_emplace(s, static_cast<int>(node.size())).first->second; };
  node_of(VarSet{});
  for (const auto& e : edges) {
    node_of(e.from);
    node_of(e.to);
  }
  for (int t : q.groupby.indices()) node_of(VarSet::singleton(t));

  for (int t : q.groupby.indices()) {
    const VarSet target = VarSet::singleton(t);
    const std::string tn = q.variables[t];
    std::vector<std::vector<LpTerm>> balance(node.size());
    for (const auto& e : edges) {
      const int f = b.lp.add_variable("f[" + tn + "](" + describe_set(q, e.from) + "->" + describe_set(q, e.to) + ")");
      balance[node.at(e.to)].push_back({f, 1.0});
      balance[node.at(e.from)].push_back({f, -1.0});
      if (e.backward) continue;
      std::vector<LpTerm> cap{{f, 1.0}};
      for (auto [k, coef] : e.capacity) cap.push_back({b.stat_index[k], -coef});
      b.lp.add_constraint("cap_" + std::to_string(b.lp.num_constraints()), std::move(cap), RowType::le, 0);
      b.row_text.push_back("flow to " + tn + " on " + describe_set(q, e.from) + " -> " + describe_set(q, e.to) +
                           " within capacity");
      b.certificate_row.push_back(false);
    }
    for (const auto& [set, id] : node) {
      if (set.empty()) continue;
      const double need = set == target ? 1.0 : 0.0;
      b.lp.add_constraint("bal_" + std::to_string(b.lp.num_constraints()), balance[id], RowType::ge, need);
      b.row_text.push_back("net inflow to " + describe_set(q, set) + " for " + tn + " >= " + (need > 0 ? "1" : "0"));
      b.certificate_row.push_back(false);
    }
  }
  return b;
}

}  // namespace lpbound
