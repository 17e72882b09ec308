#include "lpbound/ingest.hpp"
#include "lpbound/log.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <fstream>
#include <json.hpp>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace lpbound {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- manifest and CSV

SchemaManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open schema manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IngestError("malformed schema manifest " + path.string() + ": " + e.what());
  }
  SchemaManifest m;
  const auto base = path.parent_path();
  try {
    for (const auto& r : j.at("relations")) {
      RelationSource src;
      src.name = r.at("name").get<std::string>();
      fs::path csv = r.value("csv", src.name + ".csv");
      src.csv = csv.is_absolute() ? csv : base / csv;
      for (const auto& c : r.at("columns")) {
        ColumnSpec spec;
        spec.name = c.at("name").get<std::string>();
        auto type = parse_column_type(c.value("type", "int"));
        if (!type) throw IngestError("unknown column type for " + src.name + "." + spec.name);
        spec.type = *type;
        src.columns.push_back(spec);
      }
      if (r.contains("predicate_columns"))
        src.predicate_columns = r.at("predicate_columns").get<std::vector<std::string>>();
      m.relations.push_back(std::move(src));
    }
    if (j.contains("propagations")) {
      for (const auto& p : j.at("propagations")) {
        Propagation prop;
        prop.pk_relation = p.at("pk_relation").get<std::string>();
        prop.fk_relation = p.at("fk_relation").get<std::string>();
        prop.key_column = p.at("key_column").get<std::string>();
        prop.fk_column = p.value("fk_column", prop.key_column);
        prop.predicate_column = p.at("predicate_column").get<std::string>();
        m.propagations.push_back(prop);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw IngestError("schema manifest " + path.string() + ": " + e.what());
  }
  return m;
}

namespace {

// Splits RFC-4180 text into records; each record remembers the line it starts on.
struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

std::vector<CsvRecord> split_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::size_t i = 0;
  std::size_t line = 1;
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < text.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      if (i < text.size() && text[i] == '"') {
        ++i;
        while (true) {
          if (i >= text.size()) throw IngestError("unterminated quoted field", rec.line);
          if (text[i] == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field += '"';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (text[i] == '\n') ++line;
          field += text[i++];
        }
        if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
          throw IngestError("unexpected character after closing quote", line);
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
          field += text[i++];
      }
      rec.fields.push_back(std::move(field));
      field.clear();
      if (i >= text.size()) {
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {
        if (text[i] == '\r') ++i;
        if (i < text.size() && text[i] == '\n') ++i;
        ++line;
        done = true;
      }
    }
    if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace

RelationData parse_csv(std::string_view text, const std::string& name,
                       const std::vector<ColumnSpec>& columns) {
  RelationData r;
  r.name = name;
  r.columns = columns;
  auto records = split_csv(text);
  if (records.empty()) throw IngestError("missing header row in " + name);
  const auto& header = records.front();
  if (header.fields.size() != columns.size())
    throw IngestError("header of " + name + " has " + std::to_string(header.fields.size()) +
                          " columns, schema has " + std::to_string(columns.size()),
                      header.line);
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (header.fields[c] != columns[c].name)
      throw IngestError("header column '" + header.fields[c] + "' does not match schema column '" +
                            columns[c].name + "' in " + name,
                        header.line);
  r.rows.reserve(records.size() - 1);
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& rec = records[k];
    if (rec.fields.size() != columns.size())
      throw IngestError("row of " + name + " has " + std::to_string(rec.fields.size()) +
                            " fields, expected " + std::to_string(columns.size()),
                        rec.line);
    std::vector<Value> row;
    row.reserve(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
      auto v = parse_cell(rec.fields[c], columns[c].type);
      if (!v)
        throw IngestError("cannot read '" + rec.fields[c] + "' as " +
                              std::string(to_string(columns[c].type)) + " in " + name + "." +
                              columns[c].name,
                          rec.line);
      row.push_back(std::move(*v));
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

RelationData load_csv(const fs::path& path, const std::string& name,
                      const std::vector<ColumnSpec>& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), name, columns);
  } catch (const IngestError& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

std::vector<RelationData> load_database(const SchemaManifest& manifest) {
  std::vector<RelationData> out;
  for (const auto& src : manifest.relations) out.push_back(load_csv(src.csv, src.name, src.columns));
  return out;
}

StatsConfig config_from_manifest(const SchemaManifest& manifest) {
  StatsConfig cfg;
  cfg.propagations = manifest.propagations;
  for (const auto& r : manifest.relations)
    if (r.predicate_columns) cfg.predicate_columns[r.name] = *r.predicate_columns;
  return cfg;
}

void StatsConfig::validate() const {
  if (std::find(p_set.begin(), p_set.end(), PNorm(1.0)) == p_set.end())
    throw std::invalid_argument("p set must contain 1");
  if (std::find(p_set.begin(), p_set.end(), PNorm::infinity()) == p_set.end())
    throw std::invalid_argument("p set must contain inf");
  for (auto p : p_set)
    if (!(p.value() >= 1.0)) throw std::invalid_argument("p values must be at least 1");
  if (mcv_count < 0 || mcv_count > 5000) throw std::invalid_argument("mcv count must be in [0, 5000]");
  if (histogram_bottom_buckets < 2 || !std::has_single_bit(static_cast<unsigned>(histogram_bottom_buckets)))
    throw std::invalid_argument("histogram bottom buckets must be a power of two and at least 2");
  for (int e : prefix_exponents)
    if (e < 0 || e > 40) throw std::invalid_argument("prefix exponents must be in [0, 40]");
  if (threads < 1) throw std::invalid_argument("thread count must be positive");
}

// ---------------------------------------------------------------- degree sequences

namespace {

// Columns dictionary-encoded by sorted distinct value.
struct Encoded {
  std::size_t arity = 0;
  std::vector<std::vector<std::uint32_t>> ids;  // per column, per row
  std::vector<std::vector<Value>> dict;         // per column, id -> value
  std::vector<std::size_t> distinct;            // one representative row per distinct tuple

  explicit Encoded(const RelationData& r) : arity(r.arity()), ids(r.arity()), dict(r.arity()) {
    for (std::size_t c = 0; c < arity; ++c) {
      std::map<Value, std::uint32_t, ValueLess> index;
      for (const auto& row : r.rows) index.emplace(row[c], 0);
      std::uint32_t next = 0;
      for (auto& [value, id] : index) {
        id = next++;
        dict[c].push_back(value);
      }
      ids[c].reserve(r.rows.size());
      for (const auto& row : r.rows) ids[c].push_back(index.at(row[c]));
    }
    std::vector<std::size_t> order(r.rows.size());
    std::iota(order.begin(), order.end(), 0);
    auto less = [&](std::size_t a, std::size_t b) {
      for (std::size_t c = 0; c < arity; ++c)
        if (ids[c][a] != ids[c][b]) return ids[c][a] < ids[c][b];
      return a < b;
    };
    std::sort(order.begin(), order.end(), less);
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k > 0) {
        bool same = true;
        for (std::size_t c = 0; c < arity && same; ++c) same = ids[c][order[k]] == ids[c][order[k - 1]];
        if (same) continue;
      }
      distinct.push_back(order[k]);
    }
  }
};

std::vector<std::uint64_t> sorted_runs(std::vector<std::uint32_t> keys) {
  std::sort(keys.begin(), keys.end());
  std::vector<std::uint64_t> degrees;
  for (std::size_t k = 0; k < keys.size();) {
    std::size_t e = k;
    while (e < keys.size() && keys[e] == keys[k]) ++e;
    degrees.push_back(e - k);
    k = e;
  }
  std::sort(degrees.begin(), degrees.end(), std::greater<>());
  return degrees;
}

// deg(v|u) over the projection onto u ∪ v of the given rows.
std::vector<std::uint64_t> degrees_of(const Encoded& e, const std::vector<std::size_t>& rows,
                                      std::optional<std::size_t> u, const std::vector<std::size_t>& v) {
  std::vector<std::size_t> cols;
  if (u) cols.push_back(*u);
  for (auto c : v)
    if (!u || c != *u) cols.push_back(c);
  std::vector<std::size_t> order = rows;
  auto less = [&](std::size_t a, std::size_t b) {
    for (auto c : cols)
      if (e.ids[c][a] != e.ids[c][b]) return e.ids[c][a] < e.ids[c][b];
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  order.erase(std::unique(order.begin(), order.end(),
                          [&](std::size_t a, std::size_t b) { return !less(a, b) && !less(b, a); }),
              order.end());
  if (!u) {
    if (order.empty()) return {};
    return {order.size()};
  }
  std::vector<std::uint32_t> keys;
  keys.reserve(order.size());
  for (auto r : order) keys.push_back(e.ids[*u][r]);
  return sorted_runs(std::move(keys));
}

// deg(*|u) over distinct full rows; `rows` must already be distinct representatives.
std::vector<std::uint64_t> full_degrees(const Encoded& e, const std::vector<std::size_t>& rows,
                                        std::optional<std::size_t> u) {
  if (!u) {
    if (rows.empty()) return {};
    return {rows.size()};
  }
  std::vector<std::uint32_t> keys;
  keys.reserve(rows.size());
  for (auto r : rows) keys.push_back(e.ids[*u][r]);
  return sorted_runs(std::move(keys));
}

DegreeSequence make_sequence(std::vector<std::uint64_t> degrees, const std::vector<ColumnSpec>& cols,
                             std::optional<std::size_t> u, const std::vector<std::size_t>& v) {
  DegreeSequence d;
  d.degrees = std::move(degrees);
  if (u) d.u_column = cols[*u].name;
  for (auto c : v) d.v_columns.push_back(cols[c].name);
  return d;
}

}  // namespace

DegreeSequence compute_degree_sequence(const RelationData& r, const std::optional<std::string>& u,
                                       const std::vector<std::string>& v, const RowFilter& filter) {
  std::optional<std::size_t> ui;
  if (u) ui = r.require_column(*u);
  std::vector<std::size_t> vi;
  for (const auto& c : v) vi.push_back(r.require_column(c));
  std::sort(vi.begin(), vi.end());
  Encoded e(r);
  std::vector<std::size_t> rows;
  for (std::size_t k = 0; k < r.rows.size(); ++k)
    if (!filter || filter(r.rows[k])) rows.push_back(k);
  return make_sequence(degrees_of(e, rows, ui, vi), r.columns, ui, vi);
}

// ---------------------------------------------------------------- propagation

std::string propagated_column_name(const Propagation& prop) {
  return prop.pk_relation + "." + prop.predicate_column;
}

RelationData propagate(const RelationData& pk, const RelationData& fk, const Propagation& prop) {
  const auto key = pk.column_index(prop.key_column);
  const auto attr = pk.column_index(prop.predicate_column);
  const auto fkey = fk.column_index(prop.fk_column);
  if (!key || !attr || !fkey)
    throw IngestError("propagation " + prop.pk_relation + "->" + prop.fk_relation +
                      " references an unknown column");
  std::map<Value, const Value*, ValueLess> lookup;
  for (const auto& row : pk.rows) {
    if (is_null(row[*key])) continue;
    if (!lookup.emplace(row[*key], &row[*attr]).second)
      throw IngestError("propagation column " + prop.pk_relation + "." + prop.key_column +
                        " is not a key: value '" + canonical_text(row[*key]) + "' repeats");
  }
  RelationData out;
  out.name = fk.name;
  out.columns = fk.columns;
  out.columns.push_back({propagated_column_name(prop), pk.columns[*attr].type});
  out.rows.reserve(fk.rows.size());
  for (const auto& row : fk.rows) {
    auto extended = row;
    auto it = is_null(row[*fkey]) ? lookup.end() : lookup.find(row[*fkey]);
    extended.push_back(it == lookup.end() ? Value{} : *it->second);
    out.rows.push_back(std::move(extended));
  }
  return out;
}

// ---------------------------------------------------------------- catalog construction

namespace {

struct PartialCatalog {
  std::vector<std::pair<StatKey, NormSet>> stats;
  std::vector<PredicateMeta> predicates;
  std::optional<RelationInfo> info;
};

std::vector<std::string> names_of(const std::vector<ColumnSpec>& cols, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(cols[i].name);
  return out;
}

// Adds the whole-relation conditionals of one relation and their prefixes.
void add_whole_stats(const RelationData& r, const Encoded& e, const StatsConfig& cfg, PartialCatalog& out) {
  const std::size_t k = r.arity();
  std::vector<std::size_t> all(k);
  std::iota(all.begin(), all.end(), 0);
  const int max_exp = cfg.prefix_exponents.empty()
                          ? -1
                          : *std::max_element(cfg.prefix_exponents.begin(), cfg.prefix_exponents.end());

  auto emit = [&](std::optional<std::size_t> u, const std::vector<std::size_t>& v,
                  std::vector<std::uint64_t> degrees) {
    auto seq = make_sequence(std::move(degrees), r.columns, u, v);
    StatKey key{r.name, u ? std::optional<std::string>(r.columns[*u].name) : std::nullopt,
                names_of(r.columns, v), StatVariant::whole()};
    out.stats.emplace_back(key, NormSet::of(seq, cfg.p_set));
    if (u && max_exp >= 0 && seq.length() > (std::size_t{1} << max_exp)) {
      for (int i : cfg.prefix_exponents) {
        StatKey pk = key;
        pk.variant = StatVariant::prefix_of(i);
        out.stats.emplace_back(pk, NormSet::of(seq.prefix(i), cfg.p_set));
      }
    }
  };

  std::vector<std::size_t> rows(r.rows.size());
  std::iota(rows.begin(), rows.end(), 0);
  emit(std::nullopt, all, full_degrees(e, e.distinct, std::nullopt));
  if (k < 2) return;
  for (std::size_t c = 0; c < k; ++c) emit(std::nullopt, {c}, degrees_of(e, rows, std::nullopt, {c}));
  for (std::size_t x = 0; x < k; ++x) {
    std::vector<std::size_t> rest;
    for (auto c : all)
      if (c != x) rest.push_back(c);
    emit(x, rest, full_degrees(e, e.distinct, x));
    if (k < 3) continue;
    for (auto c : rest) emit(x, {c}, degrees_of(e, rows, x, {c}));
  }
}

// Pointwise maximum of descending sequences.
void pointwise_max(std::vector<std::uint64_t>& acc, const std::vector<std::uint64_t>& seq) {
  if (seq.size() > acc.size()) acc.resize(seq.size(), 0);
  for (std::size_t i = 0; i < seq.size(); ++i) acc[i] = std::max(acc[i], seq[i]);
}

// MCV, non-MCV and histogram statistics for predicate column `a` of `r`. Conditionals are the
// full ones of `base_columns` (the relation's own columns) with u ∈ {∅} ∪ base_columns − {a}.
void add_predicate_stats(const RelationData& r, const Encoded& e, std::size_t a,
                         std::size_t base_columns, const std::string& stat_relation,
                         const std::string& source, const std::string& meta_column,
                         const StatsConfig& cfg, PartialCatalog& out) {
  std::vector<std::size_t> base(base_columns);
  std::iota(base.begin(), base.end(), 0);
  std::vector<std::optional<std::size_t>> conditionals{std::nullopt};
  for (auto c : base)
    if (c != a) conditionals.emplace_back(c);

  // Representatives of distinct rows over base columns plus a.
  std::vector<std::size_t> cols = base;
  if (a >= base_columns) cols.push_back(a);
  std::vector<std::size_t> reps(r.rows.size());
  std::iota(reps.begin(), reps.end(), 0);
  auto less = [&](std::size_t x, std::size_t y) {
    for (auto c : cols)
      if (e.ids[c][x] != e.ids[c][y]) return e.ids[c][x] < e.ids[c][y];
    return false;
  };
  std::sort(reps.begin(), reps.end(), less);
  reps.erase(std::unique(reps.begin(), reps.end(),
                         [&](std::size_t x, std::size_t y) { return !less(x, y) && !less(y, x); }),
             reps.end());

  auto key_for = [&](std::optional<std::size_t> u, StatVariant variant) {
    std::vector<std::size_t> v;
    for (auto c : base)
      if (!u || c != *u) v.push_back(c);
    return StatKey{stat_relation, u ? std::optional<std::string>(r.columns[*u].name) : std::nullopt,
                   names_of(r.columns, v), std::move(variant)};
  };
  // Degrees over base columns only: project the rows satisfying the predicate.
  auto emit_subset = [&](const std::vector<std::size_t>& subset, const StatVariant& variant) {
    for (auto u : conditionals) {
      std::vector<std::size_t> v;
      for (auto c : base)
        if (!u || c != *u) v.push_back(c);
      auto degrees = a >= base_columns ? degrees_of(e, subset, u, base) : full_degrees(e, subset, u);
      auto seq = make_sequence(std::move(degrees), r.columns, u, v);
      out.stats.emplace_back(key_for(u, variant), NormSet::of(seq, cfg.p_set));
    }
  };

  PredicateMeta meta;
  meta.relation = stat_relation;
  meta.source = source;
  meta.column = meta_column;
  meta.type = r.columns[a].type;

  // Row frequency of each non-NULL value of a, over the bag.
  const auto& dict = e.dict[a];
  std::vector<std::uint64_t> freq(dict.size(), 0);
  for (std::size_t row = 0; row < r.rows.size(); ++row) ++freq[e.ids[a][row]];
  std::vector<std::uint32_t> by_freq;
  for (std::uint32_t id = 0; id < dict.size(); ++id)
    if (!is_null(dict[id])) by_freq.push_back(id);
  // Ids are assigned in ascending value order, so the id breaks frequency ties.
  std::stable_sort(by_freq.begin(), by_freq.end(),
                   [&](std::uint32_t x, std::uint32_t y) { return freq[x] > freq[y]; });
  const std::size_t mcv_n = std::min<std::size_t>(by_freq.size(), static_cast<std::size_t>(cfg.mcv_count));
  std::vector<int> mcv_rank(dict.size(), -1);
  for (std::size_t i = 0; i < mcv_n; ++i) mcv_rank[by_freq[i]] = static_cast<int>(i);

  std::vector<std::vector<std::size_t>> per_mcv(mcv_n);
  std::map<std::uint32_t, std::vector<std::size_t>> per_other;
  for (auto row : reps) {
    const auto id = e.ids[a][row];
    if (is_null(dict[id])) continue;
    if (mcv_rank[id] >= 0)
      per_mcv[mcv_rank[id]].push_back(row);
    else
      per_other[id].push_back(row);
  }
  for (std::size_t i = 0; i < mcv_n; ++i) {
    const auto literal = canonical_text(dict[by_freq[i]]);
    meta.mcvs.push_back(literal);
    emit_subset(per_mcv[i], StatVariant::mcv(meta_column, literal, source));
  }

  for (auto u : conditionals) {
    std::vector<std::uint64_t> acc;
    for (const auto& [id, rows] : per_other) {
      auto degrees = a >= base_columns ? degrees_of(e, rows, u, base) : full_degrees(e, rows, u);
      pointwise_max(acc, degrees);
    }
    std::vector<std::size_t> v;
    for (auto c : base)
      if (!u || c != *u) v.push_back(c);
    auto seq = make_sequence(std::move(acc), r.columns, u, v);
    out.stats.emplace_back(key_for(u, StatVariant::non_mcv(meta_column, source)), NormSet::of(seq, cfg.p_set));
  }

  if (meta.type != ColumnType::string) {
    HistogramMeta h;
    h.buckets = cfg.histogram_bottom_buckets;
    bool any = false;
    for (const auto& value : dict) {
      auto x = numeric_value(value);
      if (!x) continue;
      if (!any) {
        h.min = h.max = *x;
        any = true;
      }
      h.min = std::min(h.min, *x);
      h.max = std::max(h.max, *x);
    }
    std::vector<int> bottom(dict.size(), -1);
    for (std::uint32_t id = 0; id < dict.size(); ++id)
      if (auto x = numeric_value(dict[id])) bottom[id] = h.bucket_of(*x);
    for (int layer = 0; layer < h.layers(); ++layer) {
      std::map<int, std::vector<std::size_t>> buckets;
      for (auto row : reps) {
        const int b = bottom[e.ids[a][row]];
        if (b >= 0) buckets[b >> layer].push_back(row);
      }
      for (const auto& [index, rows] : buckets)
        emit_subset(rows, StatVariant::bucket(meta_column, layer, index, source));
    }
    meta.histogram = h;
  }
  out.predicates.push_back(std::move(meta));
}

PartialCatalog build_relation(const RelationData& r, const StatsConfig& cfg) {
  PartialCatalog out;
  Encoded e(r);
  out.info = RelationInfo{r.name, r.columns, r.rows.size(), e.distinct.size()};
  add_whole_stats(r, e, cfg, out);
  std::vector<std::string> pred_cols;
  if (auto it = cfg.predicate_columns.find(r.name); it != cfg.predicate_columns.end())
    pred_cols = it->second;
  else
    for (const auto& c : r.columns) pred_cols.push_back(c.name);
  for (const auto& name : pred_cols) {
    const auto a = r.require_column(name);
    add_predicate_stats(r, e, a, r.arity(), r.name, "", name, cfg, out);
  }
  return out;
}

PartialCatalog build_propagation(const RelationData& pk, const RelationData& fk, const Propagation& prop,
                                 const StatsConfig& cfg) {
  PartialCatalog out;
  auto extended = propagate(pk, fk, prop);
  Encoded e(extended);
  add_predicate_stats(extended, e, extended.arity() - 1, fk.arity(), fk.name, prop.pk_relation,
                      prop.predicate_column, cfg, out);
  return out;
}

}  // namespace

Catalog build_statistics(const std::vector<RelationData>& relations, const StatsConfig& cfg) {
  cfg.validate();
  std::map<std::string, const RelationData*> by_name;
  for (const auto& r : relations) {
    if (!by_name.emplace(r.name, &r).second) throw IngestError("duplicate relation " + r.name);
    for (const auto& row : r.rows)
      if (row.size() != r.arity()) throw IngestError("ragged rows in relation " + r.name);
  }
  for (const auto& prop : cfg.propagations) {
    if (!by_name.count(prop.pk_relation) || !by_name.count(prop.fk_relation))
      throw IngestError("propagation references unknown relation " + prop.pk_relation + " or " +
                        prop.fk_relation);
  }

  const std::size_t tasks = relations.size() + cfg.propagations.size();
  std::vector<PartialCatalog> parts(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  auto run = [&](std::size_t t) {
    try {
      if (t < relations.size()) {
        parts[t] = build_relation(relations[t], cfg);
      } else {
        const auto& prop = cfg.propagations[t - relations.size()];
        parts[t] = build_propagation(*by_name.at(prop.pk_relation), *by_name.at(prop.fk_relation), prop, cfg);
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  const int workers = std::min<int>(cfg.threads, static_cast<int>(std::max<std::size_t>(tasks, 1)));
  log().info("building statistics for {} relations and {} propagations on {} threads", relations.size(),
             cfg.propagations.size(), std::max(workers, 1));
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) run(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t t; (t = next.fetch_add(1)) < tasks;) run(t);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  Catalog c;
  c.p_set = cfg.p_set;
  std::sort(c.p_set.begin(), c.p_set.end());
  c.p_set.erase(std::unique(c.p_set.begin(), c.p_set.end()), c.p_set.end());
  c.prefix_exponents = cfg.prefix_exponents;
  std::sort(c.prefix_exponents.begin(), c.prefix_exponents.end());
  c.prefix_exponents.erase(std::unique(c.prefix_exponents.begin(), c.prefix_exponents.end()),
                           c.prefix_exponents.end());
  c.propagations = cfg.propagations;
  for (auto& part : parts) {
    if (part.info) c.relations[part.info->name] = *part.info;
    for (auto& [k, v] : part.stats) c.stats.insert_or_assign(k, v);
    for (auto& m : part.predicates) c.predicates[{m.relation, m.source, m.column}] = m;
  }
  log().info("catalog holds {} statistics", c.stats.size());
  return c;
}

}  // namespace lpbound
