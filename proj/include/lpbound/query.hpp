#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lpbound/catalog.hpp"
#include "lpbound/value.hpp"
#include "lpbound/varset.hpp"

namespace lpbound {

struct PredicateExpr {
  enum class Kind { eq, range, conj, disj };

  Kind kind = Kind::eq;
  std::string column;
  Value literal;
  Value lo;
  Value hi;
  std::vector<PredicateExpr> children;

  static PredicateExpr eq(std::string column, Value literal);
  static PredicateExpr range(std::string column, Value lo, Value hi);
  static PredicateExpr all_of(std::vector<PredicateExpr> children);
  static PredicateExpr any_of(std::vector<PredicateExpr> children);

  /// Columns referenced by leaves, deduplicated, in first-use order.
  std::vector<std::string> columns() const;
  /// Evaluates the predicate on one row given a column lookup.
  template <typename Lookup>
  bool matches(Lookup&& cell) const;

  bool operator==(const PredicateExpr& o) const;
};

struct Atom {
  std::string relation;
  /// Distinguishes self-join occurrences ("R#2"); empty for the plain relation name.
  std::string alias;
  std::vector<std::string> vars;
  std::optional<PredicateExpr> predicate;

  std::string label() const { return alias.empty() ? relation : alias; }
  bool operator==(const Atom&) const = default;
};

struct ConjunctiveQuery {
  std::string name;
  std::vector<Atom> atoms;
  std::vector<std::string> groupby;

  /// Variables in order of first appearance.
  std::vector<std::string> variables() const;
  bool is_full() const;
  bool operator==(const ConjunctiveQuery&) const = default;
};

/// The hypergraph of a query: variables by index, one variable set per atom, and for every
/// atom the variable bound at each column position.
struct QueryShape {
  std::vector<std::string> variables;
  std::vector<VarSet> atoms;
  std::vector<std::vector<int>> column_var;
  VarSet groupby;

  int size() const { return static_cast<int>(variables.size()); }
  VarSet all() const { return VarSet::first(size()); }
  bool is_full() const { return groupby == all(); }
  /// Variables occurring in at least two atoms.
  VarSet join_variables() const;
  std::string describe(VarSet set) const;
};

QueryShape shape_of(const ConjunctiveQuery& q);

struct Consolidation {
  QueryShape shape;
  /// For each consolidated variable, the original variable indices it stands for.
  std::vector<std::vector<int>> members;
  /// Original variable index to consolidated index.
  std::vector<int> image;
};

Consolidation consolidate_variables(const QueryShape& shape);
Consolidation consolidate_variables(const ConjunctiveQuery& q);

/// GYO reduction on the hypergraph.
bool is_alpha_acyclic(const std::vector<VarSet>& edges);
bool is_berge_acyclic(const QueryShape& shape);
bool is_berge_acyclic(const ConjunctiveQuery& q);

std::vector<std::string> validate_query(const ConjunctiveQuery& q, const Catalog& catalog);

template <typename Lookup>
bool PredicateExpr::matches(Lookup&& cell) const {
  switch (kind) {
    case Kind::eq: {
      const Value& v = cell(column);
      return !is_null(v) && compare_values(v, literal) == 0;
    }
    case Kind::range: {
      const Value& v = cell(column);
      return !is_null(v) && compare_values(v, lo) >= 0 && compare_values(v, hi) <= 0;
    }
    case Kind::conj:
      for (const auto& c : children)
        if (!c.matches(cell)) return false;
      return true;
    case Kind::disj:
      for (const auto& c : children)
        if (c.matches(cell)) return true;
      return false;
  }
  return false;
}

}  // namespace lpbound
