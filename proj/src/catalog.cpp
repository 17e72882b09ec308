#include "lpbound/catalog.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "lpbound/relation.hpp"

namespace lpbound {

std::optional<std::size_t> RelationData::column_index(const std::string& column) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == column) return i;
  return std::nullopt;
}

std::size_t RelationData::require_column(const std::string& column) const {
  if (auto i = column_index(column)) return *i;
  throw std::invalid_argument("relation " + name + " has no column " + column);
}

std::optional<std::size_t> RelationInfo::column_index(const std::string& column) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == column) return i;
  return std::nullopt;
}

StatVariant StatVariant::mcv(std::string column, std::string literal, std::string source) {
  StatVariant v;
  v.kind = VariantKind::mcv;
  v.column = std::move(column);
  v.literal = std::move(literal);
  v.source = std::move(source);
  return v;
}

StatVariant StatVariant::non_mcv(std::string column, std::string source) {
  StatVariant v;
  v.kind = VariantKind::non_mcv;
  v.column = std::move(column);
  v.source = std::move(source);
  return v;
}

StatVariant StatVariant::bucket(std::string column, int layer, int index, std::string source) {
  StatVariant v;
  v.kind = VariantKind::bucket;
  v.column = std::move(column);
  v.layer = layer;
  v.index = index;
  v.source = std::move(source);
  return v;
}

StatVariant StatVariant::prefix_of(int exponent) {
  StatVariant v;
  v.kind = VariantKind::prefix;
  v.prefix = exponent;
  return v;
}

// Percent-encodes the separators used by the catalog key syntax.
std::string escape_key_text(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (c == '%' || c == ':' || c == '/' || c == ',' || c == ' ' || c == '\n' || c == '\r' ||
        c == '\t' || c < 0x20) {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::optional<std::string> unescape_key_text(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    if (i + 2 >= s.size()) return std::nullopt;
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i + 1, s.data() + i + 3, value, 16);
    if (ec != std::errc{} || ptr != s.data() + i + 3) return std::nullopt;
    out += static_cast<char>(value);
    i += 2;
  }
  return out;
}

namespace {

std::string escape(std::string_view s) { return escape_key_text(s); }
std::optional<std::string> unescape(std::string_view s) { return unescape_key_text(s); }

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string StatVariant::encode() const {
  std::string inner;
  switch (kind) {
    case VariantKind::whole: return "whole";
    case VariantKind::prefix: return "prefix:" + std::to_string(prefix);
    case VariantKind::mcv: inner = "mcv:" + escape(column) + ":" + escape(literal); break;
    case VariantKind::non_mcv: inner = "nonmcv:" + escape(column); break;
    case VariantKind::bucket:
      inner = "bucket:" + escape(column) + ":" + std::to_string(layer) + ":" + std::to_string(index);
      break;
  }
  if (source.empty()) return inner;
  return "prop:" + escape(source) + ":" + inner;
}

std::optional<StatVariant> StatVariant::decode(std::string_view text) {
  auto parts = split(text, ':');
  std::string source;
  if (parts[0] == "prop") {
    if (parts.size() < 3) return std::nullopt;
    auto s = unescape(parts[1]);
    if (!s) return std::nullopt;
    source = *s;
    parts.erase(parts.begin(), parts.begin() + 2);
  }
  const auto& tag = parts[0];
  if (tag == "whole" && parts.size() == 1 && source.empty()) return whole();
  if (tag == "prefix" && parts.size() == 2 && source.empty()) {
    auto e = to_int(parts[1]);
    if (!e) return std::nullopt;
    return prefix_of(*e);
  }
  if (tag == "mcv" && parts.size() == 3) {
    auto c = unescape(parts[1]);
    auto l = unescape(parts[2]);
    if (!c || !l) return std::nullopt;
    return mcv(*c, *l, source);
  }
  if (tag == "nonmcv" && parts.size() == 2) {
    auto c = unescape(parts[1]);
    if (!c) return std::nullopt;
    return non_mcv(*c, source);
  }
  if (tag == "bucket" && parts.size() == 4) {
    auto c = unescape(parts[1]);
    auto layer = to_int(parts[2]);
    auto index = to_int(parts[3]);
    if (!c || !layer || !index) return std::nullopt;
    return bucket(*c, *layer, *index, source);
  }
  return std::nullopt;
}

std::string StatKey::display() const {
  std::string out = "deg_" + relation + "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  out += "|";
  if (u) out += *u;
  out += ")";
  switch (variant.kind) {
    case VariantKind::whole: break;
    case VariantKind::prefix: out += "[top 2^" + std::to_string(variant.prefix) + "]"; break;
    case VariantKind::mcv: out += "[" + variant.column + "=" + variant.literal + "]"; break;
    case VariantKind::non_mcv: out += "[" + variant.column + " non-mcv]"; break;
    case VariantKind::bucket:
      out += "[" + variant.column + " bucket " + std::to_string(variant.layer) + "." +
             std::to_string(variant.index) + "]";
      break;
  }
  if (!variant.source.empty()) {
    auto close = out.rfind(']');
    out.insert(close, " via " + variant.source);
  }
  return out;
}

int HistogramMeta::bucket_of(double value) const {
  const double width = (max - min) / buckets;
  if (!(width > 0)) return 0;
  const double raw = std::floor((value - min) / width);
  if (raw < 0) return 0;
  if (raw >= buckets - 1) return buckets - 1;
  return static_cast<int>(raw);
}

int HistogramMeta::layers() const {
  return std::countr_zero(static_cast<unsigned>(buckets)) + 1;
}

bool PredicateMeta::is_mcv(const std::string& literal) const {
  return std::find(mcvs.begin(), mcvs.end(), literal) != mcvs.end();
}

const RelationInfo* Catalog::relation(const std::string& name) const {
  auto it = relations.find(name);
  return it == relations.end() ? nullptr : &it->second;
}

const NormSet* Catalog::find(const StatKey& key) const {
  auto it = stats.find(key);
  return it == stats.end() ? nullptr : &it->second;
}

const PredicateMeta* Catalog::predicate(const std::string& relation, const std::string& source,
                                        const std::string& column) const {
  auto it = predicates.find({relation, source, column});
  return it == predicates.end() ? nullptr : &it->second;
}

std::vector<StatKey> Catalog::whole_keys(const std::string& relation) const {
  std::vector<StatKey> out;
  for (auto it = stats.lower_bound(StatKey{relation, std::nullopt, {}, {}});
       it != stats.end() && it->first.relation == relation; ++it) {
    if (it->first.variant.kind == VariantKind::whole) out.push_back(it->first);
  }
  return out;
}

std::size_t Catalog::entry_count(const std::string& relation) const {
  std::size_t n = 0;
  for (auto it = stats.lower_bound(StatKey{relation, std::nullopt, {}, {}});
       it != stats.end() && it->first.relation == relation; ++it)
    ++n;
  return n;
}

}  // namespace lpbound
