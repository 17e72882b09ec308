#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lpbound/value.hpp"

namespace lpbound {

struct ColumnSpec {
  std::string name;
  ColumnType type = ColumnType::integer;
  bool operator==(const ColumnSpec&) const = default;
};

/// A relation instance. Rows form a bag; duplicates are kept.
struct RelationData {
  std::string name;
  std::vector<ColumnSpec> columns;
  std::vector<std::vector<Value>> rows;

  std::size_t arity() const { return columns.size(); }
  std::optional<std::size_t> column_index(const std::string& column) const;
  /// Throws std::invalid_argument naming the relation when the column is missing.
  std::size_t require_column(const std::string& column) const;
};

}  // namespace lpbound
