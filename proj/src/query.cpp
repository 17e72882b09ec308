#include "lpbound/query.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace lpbound {

PredicateExpr PredicateExpr::eq(std::string column, Value literal) {
  PredicateExpr e;
  e.kind = Kind::eq;
  e.column = std::move(column);
  e.literal = std::move(literal);
  return e;
}

PredicateExpr PredicateExpr::range(std::string column, Value lo, Value hi) {
  PredicateExpr e;
  e.kind = Kind::range;
  e.column = std::move(column);
  e.lo = std::move(lo);
  e.hi = std::move(hi);
  return e;
}

PredicateExpr PredicateExpr::all_of(std::vector<PredicateExpr> children) {
  PredicateExpr e;
  e.kind = Kind::conj;
  e.children = std::move(children);
  return e;
}

PredicateExpr PredicateExpr::any_of(std::vector<PredicateExpr> children) {
  PredicateExpr e;
  e.kind = Kind::disj;
  e.children = std::move(children);
  return e;
}

std::vector<std::string> PredicateExpr::columns() const {
  std::vector<std::string> out;
  auto visit = [&](const PredicateExpr& e, auto&& self) -> void {
    if (e.kind == Kind::eq || e.kind == Kind::range) {
      if (std::find(out.begin(), out.end(), e.column) == out.end()) out.push_back(e.column);
      return;
    }
    for (const auto& c : e.children) self(c, self);
  };
  visit(*this, visit);
  return out;
}

bool PredicateExpr::operator==(const PredicateExpr& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::eq: return column == o.column && compare_values(literal, o.literal) == 0 &&
                          literal.index() == o.literal.index();
    case Kind::range:
      return column == o.column && compare_values(lo, o.lo) == 0 && compare_values(hi, o.hi) == 0 &&
             lo.index() == o.lo.index() && hi.index() == o.hi.index();
    default: return children == o.children;
  }
}

std::vector<std::string> ConjunctiveQuery::variables() const {
  std::vector<std::string> out;
  for (const auto& a : atoms)
    for (const auto& v : a.vars)
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

bool ConjunctiveQuery::is_full() const {
  auto vars = variables();
  std::set<std::string> g(groupby.begin(), groupby.end());
  return g == std::set<std::string>(vars.begin(), vars.end());
}

VarSet QueryShape::join_variables() const {
  VarSet seen;
  VarSet twice;
  for (auto a : atoms) {
    twice |= seen & a;
    seen |= a;
  }
  return twice;
}

std::string QueryShape::describe(VarSet set) const {
  std::string out;
  for (int i : set.indices()) {
    if (!out.empty()) out += ",";
    out += variables[i];
  }
  return out;
}

QueryShape shape_of(const ConjunctiveQuery& q) {
  QueryShape s;
  s.variables = q.variables();
  if (s.variables.size() > static_cast<std::size_t>(VarSet::kMaxVariables))
    throw std::invalid_argument("query has more than 64 variables");
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < s.variables.size(); ++i) index[s.variables[i]] = static_cast<int>(i);
  for (const auto& a : q.atoms) {
    VarSet set;
    std::vector<int> cols;
    for (const auto& v : a.vars) {
      cols.push_back(index[v]);
      set |= VarSet::singleton(index[v]);
    }
    s.atoms.push_back(set);
    s.column_var.push_back(std::move(cols));
  }
  for (const auto& g : q.groupby) {
    auto it = index.find(g);
    if (it != index.end()) s.groupby |= VarSet::singleton(it->second);
  }
  return s;
}

Consolidation consolidate_variables(const QueryShape& shape) {
  const int n = shape.size();
  std::vector<int> occurrences(n, 0);
  for (auto a : shape.atoms)
    for (int v : a.indices()) ++occurrences[v];

  // Group original variables: shared ones stand alone, private ones merge per atom and per
  // side of the group-by boundary.
  std::vector<int> group_of(n, -1);
  std::vector<std::vector<int>> groups;
  std::vector<VarSet> private_in(shape.atoms.size());
  std::vector<VarSet> private_out(shape.atoms.size());
  for (std::size_t j = 0; j < shape.atoms.size(); ++j) {
    for (int v : shape.atoms[j].indices()) {
      if (occurrences[v] != 1) continue;
      if (shape.groupby.contains(v))
        private_in[j] |= VarSet::singleton(v);
      else
        private_out[j] |= VarSet::singleton(v);
    }
  }
  std::vector<int> owner(n, -1);
  for (std::size_t j = 0; j < shape.atoms.size(); ++j) {
    for (VarSet part : {private_in[j], private_out[j]})
      for (int v : part.indices()) owner[v] = part.lowest();
  }
  for (int v = 0; v < n; ++v) {
    const int rep = owner[v] >= 0 ? owner[v] : v;
    if (group_of[rep] < 0) {
      group_of[rep] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    group_of[v] = group_of[rep];
    groups[group_of[v]].push_back(v);
  }

  Consolidation c;
  c.members = groups;
  c.image = group_of;
  for (const auto& g : groups) {
    std::string name;
    for (int v : g) {
      if (!name.empty()) name += "+";
      name += shape.variables[v];
    }
    c.shape.variables.push_back(name);
  }
  for (std::size_t j = 0; j < shape.atoms.size(); ++j) {
    VarSet set;
    std::vector<int> cols;
    for (int v : shape.column_var[j]) {
      cols.push_back(group_of[v]);
      set |= VarSet::singleton(group_of[v]);
    }
    c.shape.atoms.push_back(set);
    c.shape.column_var.push_back(std::move(cols));
  }
  for (int v : shape.groupby.indices()) c.shape.groupby |= VarSet::singleton(group_of[v]);
  return c;
}

Consolidation consolidate_variables(const ConjunctiveQuery& q) {
  return consolidate_variables(shape_of(q));
}

bool is_alpha_acyclic(const std::vector<VarSet>& input) {
  std::vector<VarSet> edges = input;
  std::vector<bool> alive(edges.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    // Drop variables that occur in a single remaining edge.
    VarSet seen;
    VarSet twice;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!alive[i]) continue;
      twice |= seen & edges[i];
      seen |= edges[i];
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!alive[i]) continue;
      VarSet kept = edges[i] & twice;
      if (kept != edges[i]) {
        edges[i] = kept;
        changed = true;
      }
    }
    // Drop edges contained in another remaining edge.
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!alive[i]) continue;
      for (std::size_t k = 0; k < edges.size(); ++k) {
        if (k == i || !alive[k]) continue;
        if (edges[i].subset_of(edges[k])) {
          alive[i] = false;
          changed = true;
          break;
        }
      }
    }
  }
  return std::count(alive.begin(), alive.end(), true) <= 1;
}

bool is_berge_acyclic(const QueryShape& shape) {
  const auto& a = shape.atoms;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if ((a[i] & a[j]).size() > 1) return false;
  return is_alpha_acyclic(a);
}

bool is_berge_acyclic(const ConjunctiveQuery& q) { return is_berge_acyclic(shape_of(q)); }

std::vector<std::string> validate_query(const ConjunctiveQuery& q, const Catalog& catalog) {
  std::vector<std::string> out;
  if (q.atoms.empty()) out.push_back("query has no atoms");
  std::map<std::string, int> occurrences;
  for (const auto& a : q.atoms) {
    std::set<std::string> local;
    for (const auto& v : a.vars) {
      if (v.empty()) out.push_back("atom " + a.label() + " has an empty variable name");
      if (!local.insert(v).second) out.push_back("atom " + a.label() + " repeats variable " + v);
    }
    for (const auto& v : local) ++occurrences[v];
  }
  std::set<std::string> labels;
  for (const auto& a : q.atoms) {
    if (!a.alias.empty() && !labels.insert(a.alias).second) out.push_back("duplicate atom alias " + a.alias);
    const auto* rel = catalog.relation(a.relation);
    if (!rel) {
      out.push_back("unknown relation " + a.relation);
      continue;
    }
    if (rel->columns.size() != a.vars.size()) {
      out.push_back("arity mismatch for " + a.label() + ": relation has " +
                    std::to_string(rel->columns.size()) + " columns, atom has " +
                    std::to_string(a.vars.size()) + " variables");
      continue;
    }
    if (!a.predicate) continue;
    auto check = [&](const PredicateExpr& e, auto&& self) -> void {
      if (e.kind == PredicateExpr::Kind::conj || e.kind == PredicateExpr::Kind::disj) {
        if (e.children.empty()) out.push_back("empty predicate combination on " + a.label());
        for (const auto& c : e.children) self(c, self);
        return;
      }
      auto col = rel->column_index(e.column);
      if (!col) {
        out.push_back("unknown predicate column " + a.label() + "." + e.column);
        return;
      }
      if (occurrences[a.vars[*col]] > 1)
        out.push_back("predicate column " + a.label() + "." + e.column + " is a join attribute");
      if (e.kind == PredicateExpr::Kind::range && compare_values(e.lo, e.hi) > 0)
        out.push_back("empty range on " + a.label() + "." + e.column);
    };
    check(*a.predicate, check);
  }
  auto vars = q.variables();
  for (const auto& g : q.groupby)
    if (std::find(vars.begin(), vars.end(), g) == vars.end())
      out.push_back("unknown groupby variable " + g);
  return out;
}

}  // namespace lpbound
