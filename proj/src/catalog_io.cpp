#include "lpbound/catalog_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lpbound {

namespace {

constexpr std::string_view kMagic = "LPBOUND-CATALOG";

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string p_token(PNorm p) { return p.is_infinite() ? "inf" : num17(p.value()); }

std::vector<std::string> words(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

[[noreturn]] void bad(const std::string& what, std::size_t line) {
  throw CatalogError(CatalogError::Kind::format, "catalog line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) bad("bad number '" + s + "'", line);
  return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) bad("bad integer '" + s + "'", line);
  return v;
}

std::string unesc(const std::string& s, std::size_t line) {
  auto v = unescape_key_text(s);
  if (!v) bad("bad escape in '" + s + "'", line);
  return *v;
}

std::string key_text(const StatKey& k) {
  std::string v;
  for (std::size_t i = 0; i < k.v.size(); ++i) {
    if (i) v += ",";
    v += escape_key_text(k.v[i]);
  }
  return escape_key_text(k.relation) + "/" + (k.u ? escape_key_text(*k.u) : std::string()) + "/" + v + "/" +
         k.variant.encode();
}

}  // namespace

std::string serialize_catalog(const Catalog& c) {
  std::string out;
  out += std::string(kMagic) + "\n";
  out += "version " + std::to_string(kCatalogVersion) + "\n";
  out += "pset";
  for (auto p : c.p_set) out += " " + p_token(p);
  out += "\nprefixes";
  for (int e : c.prefix_exponents) out += " " + std::to_string(e);
  out += "\n";
  for (const auto& [name, info] : c.relations) {
    out += "relation " + escape_key_text(name) + " rows " + std::to_string(info.row_count) + " distinct " +
           std::to_string(info.distinct_rows) + " {\n";
    for (const auto& col : info.columns)
      out += "  column " + escape_key_text(col.name) + " " + std::string(to_string(col.type)) + "\n";
    out += "}\n";
  }
  for (const auto& p : c.propagations)
    out += "propagation " + escape_key_text(p.pk_relation) + " " + escape_key_text(p.fk_relation) + " " +
           escape_key_text(p.key_column) + " " + escape_key_text(p.fk_column) + " " +
           escape_key_text(p.predicate_column) + "\n";
  for (const auto& [id, m] : c.predicates) {
    out += "predicate " + escape_key_text(m.relation) + " " + (m.source.empty() ? "-" : escape_key_text(m.source)) +
           " " + escape_key_text(m.column) + " " + std::string(to_string(m.type)) + " {\n";
    out += "  mcvs " + std::to_string(m.mcvs.size()) + "\n";
    for (const auto& lit : m.mcvs) out += "  mcv " + (lit.empty() ? std::string("%") : escape_key_text(lit)) + "\n";
    if (m.histogram)
      out += "  histogram " + num17(m.histogram->min) + " " + num17(m.histogram->max) + " " +
             std::to_string(m.histogram->buckets) + "\n";
    out += "}\n";
  }
  for (const auto& [key, norms] : c.stats) {
    const auto base = key_text(key);
    out += "stat " + base + "/l0 " + num17(norms.ell0) + "\n";
    for (const auto& [p, value] : norms.values) out += "stat " + base + "/" + p_token(p) + " " + num17(value) + "\n";
  }
  out += "checksum " + hex64(fnv1a(out)) + "\n";
  return out;
}

Catalog deserialize_catalog(const std::string& text) {
  // Magic and version come first so that files from newer writers report a version error
  // rather than a checksum error.
  std::istringstream head(text);
  std::string first, second;
  if (!std::getline(head, first) || first != kMagic)
    throw CatalogError(CatalogError::Kind::format, "missing LPBOUND-CATALOG magic");
  std::getline(head, second);
  auto vw = words(second);
  if (vw.size() != 2 || vw[0] != "version") throw CatalogError(CatalogError::Kind::format, "missing version");
  std::uint64_t version = 0;
  {
    auto [ptr, ec] = std::from_chars(vw[1].data(), vw[1].data() + vw[1].size(), version);
    if (ec != std::errc{} || ptr != vw[1].data() + vw[1].size())
      throw CatalogError(CatalogError::Kind::format, "bad version '" + vw[1] + "'");
  }
  if (version != static_cast<std::uint64_t>(kCatalogVersion))
    throw CatalogError(CatalogError::Kind::version,
                       "unsupported catalog version " + vw[1] + " (expected " + std::to_string(kCatalogVersion) + ")");

  const auto pos = text.rfind("checksum ");
  if (pos == std::string::npos || (pos > 0 && text[pos - 1] != '\n'))
    throw CatalogError(CatalogError::Kind::checksum, "catalog has no checksum line (truncated?)");
  auto tail = words(text.substr(pos));
  if (tail.size() != 2 || hex64(fnv1a(std::string_view(text).substr(0, pos))) != tail[1])
    throw CatalogError(CatalogError::Kind::checksum, "catalog checksum mismatch");

  std::istringstream in(text.substr(0, pos));
  std::string line;
  std::size_t n = 2;
  auto next = [&]() -> std::vector<std::string> {
    if (!std::getline(in, line)) bad("unexpected end of catalog", n);
    ++n;
    return words(line);
  };
  std::getline(in, line);
  std::getline(in, line);
  std::vector<std::string> w;

  Catalog c;
  c.p_set.clear();
  w = next();
  if (w.empty() || w[0] != "pset") bad("missing pset", n);
  for (std::size_t i = 1; i < w.size(); ++i) {
    auto p = PNorm::parse(w[i]);
    if (!p) bad("bad p '" + w[i] + "'", n);
    c.p_set.push_back(*p);
  }
  w = next();
  if (w.empty() || w[0] != "prefixes") bad("missing prefixes", n);
  for (std::size_t i = 1; i < w.size(); ++i) c.prefix_exponents.push_back(static_cast<int>(parse_u64(w[i], n)));

  std::map<StatKey, NormSet> partial;
  while (std::getline(in, line)) {
    ++n;
    w = words(line);
    if (w.empty()) continue;
    if (w[0] == "relation") {
      if (w.size() != 7 || w[2] != "rows" || w[4] != "distinct" || w[6] != "{") bad("bad relation header", n);
      RelationInfo info;
      info.name = unesc(w[1], n);
      info.row_count = parse_u64(w[3], n);
      info.distinct_rows = parse_u64(w[5], n);
      for (auto cw = next(); !(cw.size() == 1 && cw[0] == "}"); cw = next()) {
        if (cw.size() != 3 || cw[0] != "column") bad("bad column line", n);
        auto type = parse_column_type(cw[2]);
        if (!type) bad("bad column type", n);
        info.columns.push_back({unesc(cw[1], n), *type});
      }
      c.relations[info.name] = info;
    } else if (w[0] == "propagation") {
      if (w.size() != 6) bad("bad propagation", n);
      c.propagations.push_back({unesc(w[1], n), unesc(w[2], n), unesc(w[3], n), unesc(w[4], n), unesc(w[5], n)});
    } else if (w[0] == "predicate") {
      if (w.size() != 6 || w[5] != "{") bad("bad predicate header", n);
      PredicateMeta m;
      m.relation = unesc(w[1], n);
      m.source = w[2] == "-" ? std::string() : unesc(w[2], n);
      m.column = unesc(w[3], n);
      auto type = parse_column_type(w[4]);
      if (!type) bad("bad predicate type", n);
      m.type = *type;
      for (auto pw = next(); !(pw.size() == 1 && pw[0] == "}"); pw = next()) {
        if (pw.size() == 2 && pw[0] == "mcvs") continue;
        if (pw.size() == 2 && pw[0] == "mcv") {
          m.mcvs.push_back(pw[1] == "%" ? std::string() : unesc(pw[1], n));
        } else if (pw.size() == 4 && pw[0] == "histogram") {
          m.histogram = HistogramMeta{parse_double(pw[1], n), parse_double(pw[2], n),
                                      static_cast<int>(parse_u64(pw[3], n))};
        } else {
          bad("bad predicate entry", n);
        }
      }
      c.predicates[{m.relation, m.source, m.column}] = m;
    } else if (w[0] == "stat") {
      if (w.size() != 3) bad("bad stat line", n);
      const auto& k = w[1];
      std::vector<std::string> parts;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= k.size(); ++i)
        if (i == k.size() || k[i] == '/') {
          parts.push_back(k.substr(start, i - start));
          start = i + 1;
        }
      if (parts.size() != 5) bad("bad stat key", n);
      StatKey key;
      key.relation = unesc(parts[0], n);
      if (!parts[1].empty()) key.u = unesc(parts[1], n);
      if (!parts[2].empty()) {
        std::size_t s = 0;
        for (std::size_t i = 0; i <= parts[2].size(); ++i)
          if (i == parts[2].size() || parts[2][i] == ',') {
            key.v.push_back(unesc(parts[2].substr(s, i - s), n));
            s = i + 1;
          }
      }
      auto variant = StatVariant::decode(parts[3]);
      if (!variant) bad("bad variant '" + parts[3] + "'", n);
      key.variant = *variant;
      const double value = parse_double(w[2], n);
      auto& norms = partial[key];
      if (parts[4] == "l0") {
        norms.ell0 = value;
      } else {
        auto p = PNorm::parse(parts[4]);
        if (!p) bad("bad p in stat key", n);
        norms.values[*p] = value;
      }
    } else {
      bad("unknown entry '" + w[0] + "'", n);
    }
  }
  for (const auto& [key, norms] : partial) {
    if (!c.relations.count(key.relation)) bad("statistic for unknown relation " + key.relation, n);
    if (norms.values.size() != c.p_set.size()) bad("statistic " + key.display() + " misses p values", n);
  }
  c.stats = std::move(partial);
  return c;
}

std::map<std::string, std::size_t> serialized_bytes_by_relation(const Catalog& c) {
  std::map<std::string, std::size_t> out;
  for (const auto& [key, norms] : c.stats) {
    const auto base = key_text(key);
    auto& n = out[key.relation];
    n += base.size() + num17(norms.ell0).size() + 10;
    for (const auto& [p, value] : norms.values) n += base.size() + p_token(p).size() + num17(value).size() + 8;
  }
  return out;
}

void save_catalog(const Catalog& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CatalogError(CatalogError::Kind::io, "cannot write " + path.string());
  const auto text = serialize_catalog(c);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw CatalogError(CatalogError::Kind::io, "write failed for " + path.string());
}

Catalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CatalogError(CatalogError::Kind::io, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize_catalog(buf.str());
}

}  // namespace lpbound
