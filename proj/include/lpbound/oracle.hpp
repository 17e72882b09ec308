#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lpbound/bounds.hpp"
#include "lpbound/query.hpp"
#include "lpbound/relation.hpp"

namespace lpbound {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relations small enough for brute force.
struct TinyDatabase {
  static constexpr std::size_t kMaxCells = 100'000;

  std::vector<RelationData> relations;

  /// Throws OracleError when the total cell count exceeds kMaxCells.
  explicit TinyDatabase(std::vector<RelationData> rels);
  const RelationData& relation(const std::string& name) const;
};

/// Distinct assignments of all query variables that satisfy every atom and predicate.
std::vector<std::vector<Value>> evaluate_join(const ConjunctiveQuery& q, const TinyDatabase& db);

/// |Q| with set semantics on the group-by variables.
std::uint64_t true_cardinality(const ConjunctiveQuery& q, const TinyDatabase& db);

/// Entropies of the uniform distribution over the full-join output, indexed by variable
/// bitmask in the order of q.variables(). h[0] = 0.
struct EntropyVector {
  std::vector<std::string> variables;
  Eigen::VectorXd h;

  double at(VarSet s) const { return h[static_cast<Eigen::Index>(s.bits())]; }
  /// The vector over consolidated variables: each group is the union of its members.
  EntropyVector consolidated(const Consolidation& c) const;
};

/// Throws OracleError for an empty output or more than 12 variables.
EntropyVector empirical_entropies(const ConjunctiveQuery& q, const TinyDatabase& db);

/// deg_r(v | u) recounted from scratch over the set projection onto u ∪ v; u may hold any
/// number of columns. NULLs count as ordinary values.
std::vector<std::uint64_t> brute_force_degrees(const RelationData& r, const std::vector<std::string>& u,
                                               const std::vector<std::string>& v,
                                               const PredicateExpr* predicate = nullptr);

/// Exact norms of deg_r(v | u) restricted to the rows passing `predicate`.
NormSet exact_filtered_norms(const RelationData& r, const std::optional<std::string>& u,
                             const std::vector<std::string>& v, const PredicateExpr* predicate,
                             const std::vector<PNorm>& ps);

/// Rows of the form (1/p)h(U) + h(V|U) <= log2 norm that the vector violates by more than tol.
std::vector<std::string> statistic_violations(const EntropyVector& h, const std::vector<StatConstraint>& stats,
                                              double tol = 1e-9);
/// Elemental submodularity and monotonicity rows violated by more than tol.
std::vector<std::string> shannon_violations(const EntropyVector& h, double tol = 1e-9);

/// Every whole statistic of every atom's relation, over the query's original variables.
std::vector<StatConstraint> catalog_statistics(const ConjunctiveQuery& q, const Catalog& c);

struct SoundnessReport {
  double bound = 0;
  std::uint64_t truth = 0;
  Method method = Method::flow;
  bool sound = false;
  /// Empty when the output is empty, has too many variables, or the vector is feasible.
  std::vector<std::string> violations;
  bool entropy_checked = false;

  bool ok() const { return sound && violations.empty(); }
};

SoundnessReport check_soundness(const ConjunctiveQuery& q, const TinyDatabase& db, const Catalog& c,
                                const EstimateOptions& options = {});

}  // namespace lpbound
