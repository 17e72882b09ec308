#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpbound/catalog.hpp"
#include "lpbound/norms.hpp"
#include "lpbound/relation.hpp"

namespace lpbound {

class IngestError : public std::runtime_error {
 public:
  IngestError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct RelationSource {
  std::string name;
  std::filesystem::path csv;
  std::vector<ColumnSpec> columns;
  /// Columns that get predicate statistics; nullopt means every column.
  std::optional<std::vector<std::string>> predicate_columns;
};

struct SchemaManifest {
  std::vector<RelationSource> relations;
  std::vector<Propagation> propagations;
};

/// Reads the JSON schema manifest; relative CSV paths resolve against the manifest's directory.
SchemaManifest load_manifest(const std::filesystem::path& path);

/// RFC-4180 CSV with a header row that must list the schema's column names in order.
RelationData load_csv(const std::filesystem::path& path, const std::string& name,
                      const std::vector<ColumnSpec>& columns);
RelationData parse_csv(std::string_view text, const std::string& name,
                       const std::vector<ColumnSpec>& columns);

std::vector<RelationData> load_database(const SchemaManifest& manifest);

using RowFilter = std::function<bool(const std::vector<Value>&)>;

/// Degree sequence of deg_r(v | u) over the set projection of r onto u ∪ v.
DegreeSequence compute_degree_sequence(const RelationData& r, const std::optional<std::string>& u,
                                       const std::vector<std::string>& v,
                                       const RowFilter& filter = {});

struct StatsConfig {
  std::vector<PNorm> p_set = default_p_set();
  int mcv_count = 100;
  int histogram_bottom_buckets = 128;
  std::vector<int> prefix_exponents = {0, 1, 2, 3};
  std::vector<Propagation> propagations;
  /// Per relation; relations not listed get predicate statistics on every column.
  std::map<std::string, std::vector<std::string>> predicate_columns;
  /// Worker threads for per-relation construction; output does not depend on it.
  int threads = 1;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

StatsConfig config_from_manifest(const SchemaManifest& manifest);

Catalog build_statistics(const std::vector<RelationData>& relations, const StatsConfig& cfg);

/// The FK-side relation extended with the PK relation's predicate column (NULL when unmatched).
/// Throws IngestError when the key column is not a key of the PK relation.
RelationData propagate(const RelationData& pk, const RelationData& fk, const Propagation& prop);

/// Name of the propagated column inside the extended relation.
std::string propagated_column_name(const Propagation& prop);

}  // namespace lpbound
