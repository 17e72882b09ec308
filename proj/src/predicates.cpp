#include "lpbound/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace lpbound {

namespace {

std::vector<std::string> full_v(const RelationInfo& rel, const std::optional<std::string>& u) {
  std::vector<std::string> v;
  for (const auto& col : rel.columns)
    if (!u || col.name != *u) v.push_back(col.name);
  return v;
}

std::string tag(const std::string& text, const std::string& source) {
  return source.empty() ? text : text + " via " + source;
}

const RelationInfo& require_relation(const Catalog& c, const std::string& relation) {
  const auto* rel = c.relation(relation);
  if (!rel) throw PredicateError("unknown relation " + relation);
  return *rel;
}

}  // namespace

std::optional<Selection> select_for_equality(const Catalog& c, const std::string& relation,
                                             const std::string& column, const Value& literal,
                                             const std::optional<std::string>& u, const std::string& source) {
  const auto* meta = c.predicate(relation, source, column);
  if (!meta || (u && *u == column)) return std::nullopt;
  const auto& rel = require_relation(c, relation);
  const auto text = canonical_text(coerce_literal(literal, meta->type));
  StatKey key{relation, u, full_v(rel, u), {}};
  if (meta->is_mcv(text)) {
    key.variant = StatVariant::mcv(column, text, source);
    if (const auto* n = c.find(key)) return Selection{*n, tag("mcv " + column + "=" + text, source)};
    return std::nullopt;
  }
  key.variant = StatVariant::non_mcv(column, source);
  if (const auto* n = c.find(key)) return Selection{*n, tag("non-mcv " + column, source)};
  return std::nullopt;
}

std::optional<Selection> select_for_range(const Catalog& c, const std::string& relation,
                                          const std::string& column, const Value& lo, const Value& hi,
                                          const std::optional<std::string>& u, const std::string& source) {
  const auto* meta = c.predicate(relation, source, column);
  if (!meta || (u && *u == column)) return std::nullopt;
  if (meta->type == ColumnType::string)
    throw PredicateError("range predicates on string column " + relation + "." + column + " are not supported");
  if (!meta->histogram) return std::nullopt;
  const auto lo_v = numeric_value(lo);
  const auto hi_v = numeric_value(hi);
  if (!lo_v || !hi_v) throw PredicateError("range bounds on " + relation + "." + column + " must be numeric");
  const auto& rel = require_relation(c, relation);
  const auto& h = *meta->histogram;
  if (*hi_v < h.min || *lo_v > h.max || *lo_v > *hi_v)
    return Selection{NormSet::zero(c.p_set), tag("empty range " + column, source)};
  const int a = h.bucket_of(std::max(*lo_v, h.min));
  const int b = h.bucket_of(std::min(*hi_v, h.max));
  int layer = 0;
  while ((a >> layer) != (b >> layer)) ++layer;
  StatKey key{relation, u, full_v(rel, u), StatVariant::bucket(column, layer, a >> layer, source)};
  const std::string label = tag("bucket " + column + " " + std::to_string(layer) + "." + std::to_string(a >> layer), source);
  // Buckets without rows are not stored.
  if (const auto* n = c.find(key)) return Selection{*n, label};
  return Selection{NormSet::zero(c.p_set), label};
}

NormSet combine_conjunction(const std::vector<NormSet>& sets) {
  if (sets.empty()) throw std::invalid_argument("conjunction of no norm sets");
  NormSet out = sets.front();
  for (std::size_t k = 1; k < sets.size(); ++k) {
    for (auto& [p, v] : out.values) {
      auto w = sets[k].at(p);
      if (w) v = std::min(v, *w);
    }
    out.ell0 = std::min(out.ell0, sets[k].ell0);
  }
  return out;
}

NormSet combine_disjunction(const std::vector<NormSet>& sets) {
  if (sets.empty()) throw std::invalid_argument("disjunction of no norm sets");
  NormSet out = sets.front();
  for (std::size_t k = 1; k < sets.size(); ++k) {
    for (auto& [p, v] : out.values) {
      auto w = sets[k].at(p);
      if (w) v += *w;
    }
    out.ell0 += sets[k].ell0;
  }
  return out;
}

std::optional<int> prefix_exponent_for(double m, const std::vector<int>& stored) {
  if (stored.empty()) return std::nullopt;
  const int need = m <= 1 ? 0 : static_cast<int>(std::ceil(std::log2(m) - 1e-12));
  std::optional<int> best;
  for (int e : stored)
    if (e >= need && (!best || e < *best)) best = e;
  return best;
}

std::optional<Selection> evaluate_predicate(const Catalog& c, const std::string& relation, const PredicateExpr& expr,
                                            const std::optional<std::string>& u, const std::string& source,
                                            std::vector<std::string>& warnings) {
  using Kind = PredicateExpr::Kind;
  switch (expr.kind) {
    case Kind::eq:
    case Kind::range: {
      auto sel = expr.kind == Kind::eq ? select_for_equality(c, relation, expr.column, expr.literal, u, source)
                                       : select_for_range(c, relation, expr.column, expr.lo, expr.hi, u, source);
      if (!sel && !c.predicate(relation, source, expr.column) && source.empty()) {
        const std::string w = "no statistics for predicate column " + relation + "." + expr.column +
                              "; predicate ignored";
        if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
      }
      return sel;
    }
    case Kind::conj: {
      std::vector<NormSet> known;
      std::string prov;
      for (const auto& child : expr.children) {
        auto sel = evaluate_predicate(c, relation, child, u, source, warnings);
        if (!sel) continue;
        known.push_back(sel->norms);
        prov += (prov.empty() ? "" : ", ") + sel->provenance;
      }
      if (known.empty()) return std::nullopt;
      if (known.size() == 1) return Selection{known.front(), prov};
      return Selection{combine_conjunction(known), "min(" + prov + ")"};
    }
    case Kind::disj: {
      std::vector<NormSet> parts;
      std::string prov;
      for (const auto& child : expr.children) {
        auto sel = evaluate_predicate(c, relation, child, u, source, warnings);
        if (!sel) return std::nullopt;
        parts.push_back(sel->norms);
        prov += (prov.empty() ? "" : ", ") + sel->provenance;
      }
      return Selection{combine_disjunction(parts), "sum(" + prov + ")"};
    }
  }
  return std::nullopt;
}

namespace {

// Keeps only the leaves on `column`; the rest become unknown.
std::optional<PredicateExpr> restrict_to(const PredicateExpr& e, const std::string& column) {
  using Kind = PredicateExpr::Kind;
  if (e.kind == Kind::eq || e.kind == Kind::range) {
    if (e.column == column) return e;
    return std::nullopt;
  }
  std::vector<PredicateExpr> kids;
  for (const auto& child : e.children) {
    auto r = restrict_to(child, column);
    if (r) kids.push_back(std::move(*r));
    else if (e.kind == Kind::disj) return std::nullopt;
  }
  if (kids.empty()) return std::nullopt;
  if (kids.size() == 1) return kids.front();
  PredicateExpr out;
  out.kind = e.kind;
  out.children = std::move(kids);
  return out;
}

void tighten(Selection& current, const Selection& other) {
  current.norms = combine_conjunction({current.norms, other.norms});
  current.provenance = current.provenance == "whole" ? other.provenance
                                                     : "min(" + current.provenance + ", " + other.provenance + ")";
}

}  // namespace

ResolvedStats resolve_query_stats(const ConjunctiveQuery& q, const Catalog& c, const StatsPolicy& policy) {
  ResolvedStats out;
  const auto shape = shape_of(q);
  for (std::size_t j = 0; j < q.atoms.size(); ++j) {
    const auto& atom = q.atoms[j];
    const auto* rel = c.relation(atom.relation);
    if (!rel) throw PredicateError("unknown relation " + atom.relation);
    AtomStats as;
    as.atom = j;

    // Predicates pushed from PK partners along declared key joins.
    std::vector<std::pair<std::string, PredicateExpr>> pushed;
    for (const auto& prop : c.propagations) {
      if (prop.fk_relation != atom.relation) continue;
      const auto fk_pos = rel->column_index(prop.fk_column);
      const auto* pk_rel = c.relation(prop.pk_relation);
      if (!fk_pos || !pk_rel) continue;
      const auto key_pos = pk_rel->column_index(prop.key_column);
      if (!key_pos) continue;
      for (std::size_t k = 0; k < q.atoms.size(); ++k) {
        const auto& partner = q.atoms[k];
        if (k == j || partner.relation != prop.pk_relation || !partner.predicate) continue;
        if (partner.vars[*key_pos] != atom.vars[*fk_pos]) continue;
        if (auto r = restrict_to(*partner.predicate, prop.predicate_column))
          pushed.emplace_back(prop.pk_relation, std::move(*r));
      }
    }

    for (const auto& key : c.whole_keys(atom.relation)) {
      const bool full = key.v.size() + (key.u ? 1 : 0) == rel->columns.size();
      if (!full) {
        const bool domain = !key.u && key.v.size() == 1;
        if (domain ? !policy.domain : !policy.simple) continue;
      }
      Selection sel{*c.find(key), "whole"};
      if (full) {
        for (const auto& [source, expr] : pushed)
          if (auto s = evaluate_predicate(c, atom.relation, expr, key.u, source, out.warnings)) tighten(sel, *s);
        if (atom.predicate)
          if (auto s = evaluate_predicate(c, atom.relation, *atom.predicate, key.u, "", out.warnings)) tighten(sel, *s);
      }
      as.stats.push_back({key, sel, full});
    }
    out.atoms.push_back(std::move(as));
  }

  if (!policy.prefixes || c.prefix_exponents.empty()) return out;

  // Distinct-value upper bound of each (atom, column), taken from the selected envelopes.
  auto distinct_bound = [&](std::size_t j, const std::string& column) {
    double m = std::numeric_limits<double>::infinity();
    const auto* rel = c.relation(q.atoms[j].relation);
    for (const auto& s : out.atoms[j].stats) {
      if (s.full && s.key.u && *s.key.u == column) m = std::min(m, s.selection.norms.ell0);
      if (!s.key.u && s.key.v.size() == 1 && s.key.v[0] == column)
        if (auto l1 = s.selection.norms.at(PNorm(1.0))) m = std::min(m, *l1);
    }
    if (rel && rel->columns.size() == 1) {
      StatKey k{rel->name, std::nullopt, {column}, {}};
      for (const auto& s : out.atoms[j].stats)
        if (s.key == k)
          if (auto l1 = s.selection.norms.at(PNorm(1.0))) m = std::min(m, *l1);
    }
    return m;
  };

  const auto joins = shape.join_variables();
  for (int x : joins.indices()) {
    const auto& name = shape.variables[x];
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < q.atoms.size(); ++j) {
      const auto* rel = c.relation(q.atoms[j].relation);
      for (std::size_t pos = 0; pos < q.atoms[j].vars.size(); ++pos)
        if (q.atoms[j].vars[pos] == name) m = std::min(m, distinct_bound(j, rel->columns[pos].name));
    }
    if (!std::isfinite(m)) continue;
    for (std::size_t j = 0; j < q.atoms.size(); ++j) {
      const auto* rel = c.relation(q.atoms[j].relation);
      for (std::size_t pos = 0; pos < q.atoms[j].vars.size(); ++pos) {
        if (q.atoms[j].vars[pos] != name) continue;
        const auto& column = rel->columns[pos].name;
        for (auto& s : out.atoms[j].stats) {
          if (!s.key.u || *s.key.u != column) continue;
          if (m == 0) {
            s.selection = Selection{NormSet::zero(c.p_set), "no join partner values for " + name};
            continue;
          }
          auto e = prefix_exponent_for(m, c.prefix_exponents);
          if (!e) continue;
          StatKey pk = s.key;
          pk.variant = StatVariant::prefix_of(*e);
          const auto* pre = c.find(pk);
          if (!pre) continue;
          tighten(s.selection, Selection{*pre, "top 2^" + std::to_string(*e)});
        }
      }
    }
  }
  return out;
}

}  // namespace lpbound
