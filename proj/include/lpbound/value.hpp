#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace lpbound {

enum class ColumnType { integer, real, string };

std::string_view to_string(ColumnType type);
std::optional<ColumnType> parse_column_type(std::string_view text);

/// A single cell. `std::monostate` is the NULL sentinel: empty CSV cells all map to it and
/// it compares equal to itself, so NULLs form one distinct value.
using Value = std::variant<std::monostate, std::int64_t, double, std::string>;

bool is_null(const Value& v);
bool is_numeric(const Value& v);
/// Numeric view of an int/real cell; nullopt for NULL and strings.
std::optional<double> numeric_value(const Value& v);

/// Canonical text used as a catalog key. Integers print without a decimal point, reals with
/// 17 significant digits, NULL as the empty string.
std::string canonical_text(const Value& v);

/// Total order: NULL first, then numbers by value, then strings lexicographically.
int compare_values(const Value& a, const Value& b);

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return compare_values(a, b) < 0; }
};

/// Parses a cell according to the column type. Empty text is NULL. Returns nullopt when the
/// text cannot be coerced.
std::optional<Value> parse_cell(std::string_view text, ColumnType type);

/// Coerces a query literal to a column's type; the literal is matched by canonical text when
/// no numeric coercion applies.
Value coerce_literal(const Value& literal, ColumnType type);

}  // namespace lpbound
