#include "lpbound/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace lpbound {

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::integer: return "int";
    case ColumnType::real: return "float";
    case ColumnType::string: return "string";
  }
  return "string";
}

std::optional<ColumnType> parse_column_type(std::string_view text) {
  if (text == "int" || text == "integer") return ColumnType::integer;
  if (text == "float" || text == "real" || text == "double") return ColumnType::real;
  if (text == "string" || text == "text") return ColumnType::string;
  return std::nullopt;
}

bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

bool is_numeric(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

std::optional<double> numeric_value(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

std::string canonical_text(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return {};
}

namespace {

int rank(const Value& v) {
  if (is_null(v)) return 0;
  if (is_numeric(v)) return 1;
  return 2;
}

}  // namespace

int compare_values(const Value& a, const Value& b) {
  const int ra = rank(a);
  const int rb = rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  if (ra == 0) return 0;
  if (ra == 1) {
    const auto* ia = std::get_if<std::int64_t>(&a);
    const auto* ib = std::get_if<std::int64_t>(&b);
    if (ia && ib) return *ia < *ib ? -1 : (*ia > *ib ? 1 : 0);
    const double x = *numeric_value(a);
    const double y = *numeric_value(b);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  const int c = std::get<std::string>(a).compare(std::get<std::string>(b));
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::optional<Value> parse_cell(std::string_view text, ColumnType type) {
  if (text.empty()) return Value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  switch (type) {
    case ColumnType::integer: {
      std::int64_t out = 0;
      auto [ptr, ec] = std::from_chars(first, last, out);
      if (ec != std::errc{} || ptr != last) return std::nullopt;
      return Value{out};
    }
    case ColumnType::real: {
      double out = 0;
      auto [ptr, ec] = std::from_chars(first, last, out);
      if (ec != std::errc{} || ptr != last || !std::isfinite(out)) return std::nullopt;
      return Value{out};
    }
    case ColumnType::string:
      return Value{std::string(text)};
  }
  return std::nullopt;
}

Value coerce_literal(const Value& literal, ColumnType type) {
  switch (type) {
    case ColumnType::integer:
      if (const auto* d = std::get_if<double>(&literal)) {
        if (std::nearbyint(*d) == *d && std::abs(*d) < 9.2e18) return Value{static_cast<std::int64_t>(*d)};
      }
      if (const auto* s = std::get_if<std::string>(&literal)) {
        if (auto v = parse_cell(*s, type)) return *v;
      }
      return literal;
    case ColumnType::real:
      if (const auto* i = std::get_if<std::int64_t>(&literal)) return Value{static_cast<double>(*i)};
      if (const auto* s = std::get_if<std::string>(&literal)) {
        if (auto v = parse_cell(*s, type)) return *v;
      }
      return literal;
    case ColumnType::string:
      if (is_numeric(literal)) return Value{canonical_text(literal)};
      return literal;
  }
  return literal;
}

}  // namespace lpbound
