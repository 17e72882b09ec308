#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpbound/catalog.hpp"
#include "lpbound/lp.hpp"
#include "lpbound/predicates.hpp"
#include "lpbound/query.hpp"
#include "lpbound/result.hpp"

namespace lpbound {

class BoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One statistics row (1/p)h(U) + h(UV) - h(U) <= log2 norm, stated over consolidated variables.
struct StatConstraint {
  StatKey key;
  std::string provenance = "whole";
  std::size_t atom = 0;
  std::string atom_label;
  VarSet u;
  VarSet uv;
  PNorm p;
  double norm = 1;
  double log2_value = 0;
  /// u ∪ v covers the atom.
  bool full = false;

  static StatConstraint make(std::size_t atom, VarSet u, VarSet uv, PNorm p, double norm);
};

/// Entropy variables h(S) of an LP, keyed by variable set. h(∅) is the constant 0.
struct EntropyVarMap {
  std::map<VarSet, int> index;

  int get(LinearProgram& lp, VarSet s, const QueryShape& shape);
  std::optional<int> find(VarSet s) const;
};

struct BoundLp {
  LinearProgram lp;
  Method method = Method::base;
  EntropyVarMap h;
  /// Per statistic: its row (base, berge, td) or its weight variable (flow); -1 when unused.
  std::vector<int> stat_index;
  /// Human-readable inequality per row.
  std::vector<std::string> row_text;
  /// Rows that are Shannon (base) or normality (td) constraints.
  std::vector<bool> certificate_row;
};

std::string describe_set(const QueryShape& shape, VarSet s);

/// max h(V0) over the polymatroid cone cut by the statistics. Refuses more than 20 variables.
BoundLp build_lp_base(const QueryShape& q, const std::vector<StatConstraint>& stats);

/// The compact LP over h(X_i) and h(V_j) for Berge-acyclic full queries with full statistics.
BoundLp build_lp_berge(const QueryShape& q, const std::vector<StatConstraint>& stats);

struct BergeRewrite {
  QueryShape shape;
  std::vector<StatConstraint> stats;
  /// Original atom index of every kept atom.
  std::vector<std::size_t> atoms;
  /// Statistics that touch kept variables but do not fit the projected atoms.
  int dropped = 0;
};

/// Drops private variables outside the group-by, projects atoms, and keeps the statistics with
/// U ⊆ W ⊆ UV as full statistics of the projected atom W. The result is a full query.
BergeRewrite rewrite_groupby_for_berge(const QueryShape& q, const std::vector<StatConstraint>& stats);
ConjunctiveQuery rewrite_groupby_for_berge(const ConjunctiveQuery& q);

/// min Σ w·log2(norm) subject to a unit flow from ∅ to every {X}, X ∈ V0.
BoundLp build_lp_flow(const QueryShape& q, const std::vector<StatConstraint>& stats);

struct TreeDecomposition {
  std::vector<VarSet> bags;
  std::vector<std::pair<int, int>> edges;

  int width() const;
  /// Empty when the decomposition is a tree with the running intersection property covering
  /// every atom; otherwise the first violation.
  std::string check(const QueryShape& q) const;
};

/// Min-fill elimination ordering; components are joined by edges with empty intersection.
TreeDecomposition find_tree_decomposition(const QueryShape& q);

/// max Σ h(bag) - Σ h(bag ∩ bag') over normal polymatroids on each bag. Refuses width > 12.
BoundLp build_lp_td(const QueryShape& q, const std::vector<StatConstraint>& stats, const TreeDecomposition& td);

/// Variables of V0 that no chain of statistics reaches from ∅; empty when the bound is finite.
VarSet uncovered_variables(const QueryShape& q, const std::vector<StatConstraint>& stats);

/// Fills weights, certificate and method rows from an optimal solution.
void extract_qinequality(const BoundLp& blp, const LpSolution& sol, const std::vector<StatConstraint>& stats,
                         BoundResult& out);

/// Builds and solves one LP over ready-made statistics.
BoundResult bound_from_stats(const QueryShape& q, const std::vector<StatConstraint>& stats, Method method,
                             const LpSolver& solver = {});

struct EstimateOptions {
  /// nullopt selects Berge for Berge-acyclic queries whose statistics fit it, flow otherwise.
  std::optional<Method> method;
  StatsPolicy policy;
  /// Adds deg(V|∅) for every column when the query has a group-by.
  bool domain_for_groupby = true;
  LpSolver solver;
};

/// Statistics of a query in consolidated variables, after predicate selection.
struct QueryStats {
  Consolidation consolidation;
  std::vector<StatConstraint> stats;
  std::vector<std::string> warnings;
  std::optional<std::string> empty_statistic;
};

QueryStats collect_statistics(const ConjunctiveQuery& q, const Catalog& c, const EstimateOptions& options);

/// Throws BoundError for invalid queries and refused LPs.
BoundResult estimate(const ConjunctiveQuery& q, const Catalog& c, const EstimateOptions& options = {});

}  // namespace lpbound
