#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpbound/catalog.hpp"
#include "lpbound/query.hpp"

namespace lpbound {

/// A norm envelope plus the chain of rules that produced it.
struct Selection {
  NormSet norms;
  std::string provenance;
};

class PredicateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The full conditional deg_relation(* | u) under `column = literal`: the MCV entry on a hit,
/// the non-MCV envelope on a miss. nullopt when the catalog has no statistics for the column.
std::optional<Selection> select_for_equality(const Catalog& c, const std::string& relation,
                                             const std::string& column, const Value& literal,
                                             const std::optional<std::string>& u,
                                             const std::string& source = {});

/// The lowest histogram bucket whose range contains [lo, hi]. Ranges outside the observed
/// domain give the zero set. Throws PredicateError for string columns.
std::optional<Selection> select_for_range(const Catalog& c, const std::string& relation,
                                          const std::string& column, const Value& lo, const Value& hi,
                                          const std::optional<std::string>& u,
                                          const std::string& source = {});

/// Pointwise minimum; ell0 is the minimum length. Throws std::invalid_argument when empty.
NormSet combine_conjunction(const std::vector<NormSet>& sets);
/// Pointwise sum (Minkowski); ell0 is the summed length. Throws std::invalid_argument when empty.
NormSet combine_disjunction(const std::vector<NormSet>& sets);

/// The stored prefix exponent to use when the join partners' smallest ℓ0 is `m`: the smallest
/// stored e with 2^e >= m. nullopt means the whole sequence (m exceeds every stored prefix).
std::optional<int> prefix_exponent_for(double m, const std::vector<int>& stored);

/// Evaluates a predicate tree against the full conditional deg_relation(* | u). Leaves without
/// statistics are unknown and do not restrict; nullopt means the whole tree is unknown.
std::optional<Selection> evaluate_predicate(const Catalog& c, const std::string& relation,
                                            const PredicateExpr& expr, const std::optional<std::string>& u,
                                            const std::string& source, std::vector<std::string>& warnings);

struct SelectedStat {
  StatKey key;
  Selection selection;
  /// u ∪ v covers every column of the relation.
  bool full = false;
};

struct AtomStats {
  std::size_t atom = 0;
  std::vector<SelectedStat> stats;
};

struct StatsPolicy {
  /// deg(V|X) for single columns V of relations with three or more columns.
  bool simple = false;
  /// deg(V|∅) for single columns V.
  bool domain = false;
  bool prefixes = true;
};

struct ResolvedStats {
  std::vector<AtomStats> atoms;
  std::vector<std::string> warnings;
};

/// Per-atom statistics for a validated query: FK-PK propagation, then predicate selection,
/// then prefix calibration across atoms sharing a variable.
ResolvedStats resolve_query_stats(const ConjunctiveQuery& q, const Catalog& c, const StatsPolicy& policy);

}  // namespace lpbound
