#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "lpbound/norms.hpp"
#include "lpbound/relation.hpp"

namespace lpbound {

/// Percent-encoding of the characters that separate fields in catalog keys (% : / , and
/// whitespace or control bytes).
std::string escape_key_text(std::string_view text);
std::optional<std::string> unescape_key_text(std::string_view text);

enum class VariantKind { whole, mcv, non_mcv, bucket, prefix };

/// Which slice of a relation a statistic describes. Predicate-driven variants (mcv, non_mcv,
/// bucket) carry the predicate column; a non-empty `source` marks statistics built on the
/// FK side of a key join with `source` as the PK relation.
struct StatVariant {
  VariantKind kind = VariantKind::whole;
  std::string column;
  std::string literal;
  int layer = 0;
  int index = 0;
  int prefix = 0;
  std::string source;

  static StatVariant whole() { return {}; }
  static StatVariant mcv(std::string column, std::string literal, std::string source = {});
  static StatVariant non_mcv(std::string column, std::string source = {});
  static StatVariant bucket(std::string column, int layer, int index, std::string source = {});
  static StatVariant prefix_of(int exponent);

  std::string encode() const;
  static std::optional<StatVariant> decode(std::string_view text);

  auto operator<=>(const StatVariant&) const = default;
  bool operator==(const StatVariant&) const = default;
};

/// Identifies the degree sequence deg_relation(v | u) under a variant. `v` lists columns in
/// schema order and never contains `u`.
struct StatKey {
  std::string relation;
  std::optional<std::string> u;
  std::vector<std::string> v;
  StatVariant variant;

  /// "deg_R(Y,Z|X)" with a bracketed variant suffix when not whole.
  std::string display() const;

  auto operator<=>(const StatKey&) const = default;
  bool operator==(const StatKey&) const = default;
};

struct HistogramMeta {
  double min = 0;
  double max = 0;
  int buckets = 1;

  /// Bottom-layer bucket of a value, clamped into range.
  int bucket_of(double value) const;
  /// Number of layers, bottom layer 0 through the single top bucket.
  int layers() const;
  bool operator==(const HistogramMeta&) const = default;
};

/// What the catalog knows about one predicate column.
struct PredicateMeta {
  std::string relation;
  std::string source;
  std::string column;
  ColumnType type = ColumnType::integer;
  std::vector<std::string> mcvs;
  std::optional<HistogramMeta> histogram;

  bool is_mcv(const std::string& literal) const;
  bool operator==(const PredicateMeta&) const = default;
};

/// A declared key join S.fk_column = R.key_column along which predicates on R.predicate_column
/// can be pushed to S.
struct Propagation {
  std::string pk_relation;
  std::string fk_relation;
  std::string key_column;
  std::string fk_column;
  std::string predicate_column;
  bool operator==(const Propagation&) const = default;
};

struct RelationInfo {
  std::string name;
  std::vector<ColumnSpec> columns;
  std::uint64_t row_count = 0;
  std::uint64_t distinct_rows = 0;

  std::optional<std::size_t> column_index(const std::string& column) const;
  bool operator==(const RelationInfo&) const = default;
};

class Catalog {
 public:
  using PredicateId = std::tuple<std::string, std::string, std::string>;

  std::vector<PNorm> p_set = default_p_set();
  std::vector<int> prefix_exponents;
  std::map<std::string, RelationInfo> relations;
  std::map<StatKey, NormSet> stats;
  std::map<PredicateId, PredicateMeta> predicates;
  std::vector<Propagation> propagations;

  const RelationInfo* relation(const std::string& name) const;
  const NormSet* find(const StatKey& key) const;
  const PredicateMeta* predicate(const std::string& relation, const std::string& source,
                                 const std::string& column) const;
  /// All whole-variant keys of a relation.
  std::vector<StatKey> whole_keys(const std::string& relation) const;
  std::size_t entry_count(const std::string& relation) const;

  bool operator==(const Catalog&) const = default;
};

}  // namespace lpbound
