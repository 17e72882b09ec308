#include "lpbound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>


namespace lpbound {

TinyDatabase::TinyDatabase(std::vector<RelationData> rels) : relations(std::move(rels)) {
  std::size_t cells = 0;
  for (const auto& r : relations) cells += r.rows.size() * r.columns.size();
  if (cells > kMaxCells)
    throw OracleError("database has " + std::to_string(cells) + " cells; the oracle accepts at most " +
                      std::to_string(kMaxCells));
}

const RelationData& TinyDatabase::relation(const std::string& name) const {
  for (const auto& r : relations)
    if (r.name == name) return r;
  throw OracleError("no relation " + name);
}

namespace {

struct AtomPlan {
  const RelationData* rel = nullptr;
  const Atom* atom = nullptr;
  std::vector<int> var;        // query variable per column
  std::vector<int> bound;      // columns whose variable is bound before this atom
  std::unordered_map<std::string, std::vector<std::size_t>> index;
};

std::string key_of(const std::vector<Value>& values) {
  std::string k;
  for (const auto& v : values) {
    k += canonical_text(v);
    k += '\x1f';
  }
  return k;
}

}  // namespace

std::vector<std::vector<Value>> evaluate_join(const ConjunctiveQuery& q, const TinyDatabase& db) {
  const auto vars = q.variables();
  auto var_index = [&](const std::string& v) {
    return static_cast<int>(std::find(vars.begin(), vars.end(), v) - vars.begin());
  };

  // Atoms in an order that binds variables early; ties keep query order.
  std::vector<int> occurrences(vars.size(), 0);
  for (const auto& a : q.atoms)
    for (const auto& v : a.vars) ++occurrences[var_index(v)];
  std::vector<AtomPlan> plan;
  std::vector<bool> used(q.atoms.size(), false);
  std::vector<bool> is_bound(vars.size(), false);
  for (std::size_t step = 0; step < q.atoms.size(); ++step) {
    int best = -1;
    int best_bound = -1;
    for (std::size_t j = 0; j < q.atoms.size(); ++j) {
      if (used[j]) continue;
      int b = 0;
      for (const auto& v : q.atoms[j].vars) b += is_bound[var_index(v)];
      if (b > best_bound) {
        best = static_cast<int>(j);
        best_bound = b;
      }
    }
    used[best] = true;
    AtomPlan p;
    p.atom = &q.atoms[best];
    p.rel = &db.relation(p.atom->relation);
    if (p.rel->columns.size() != p.atom->vars.size())
      throw OracleError("atom " + p.atom->label() + " has the wrong arity");
    for (std::size_t c = 0; c < p.atom->vars.size(); ++c) {
      const int v = var_index(p.atom->vars[c]);
      p.var.push_back(v);
      if (is_bound[v]) p.bound.push_back(static_cast<int>(c));
    }
    for (int v : p.var) is_bound[v] = true;
    for (std::size_t r = 0; r < p.rel->rows.size(); ++r) {
      const auto& row = p.rel->rows[r];
      if (p.atom->predicate) {
        auto cell = [&](const std::string& col) -> const Value& { return row[p.rel->require_column(col)]; };
        if (!p.atom->predicate->matches(cell)) continue;
      }
      bool has_null = false;
      std::vector<Value> key;
      for (int c : p.bound) key.push_back(row[c]);
      for (std::size_t c = 0; c < row.size(); ++c)
        has_null = has_null || (is_null(row[c]) && occurrences[p.var[c]] > 1);
      if (has_null) continue;  // NULL never joins
      p.index[key_of(key)].push_back(r);
    }
    plan.push_back(std::move(p));
  }

  std::set<std::vector<std::string>> seen;
  std::vector<std::vector<Value>> out;
  std::vector<Value> assignment(vars.size());
  auto rec = [&](auto&& self, std::size_t k) -> void {
    if (k == plan.size()) {
      std::vector<std::string> key;
      for (const auto& v : assignment) key.push_back(canonical_text(v));
      if (seen.insert(std::move(key)).second) out.push_back(assignment);
      return;
    }
    const auto& p = plan[k];
    std::vector<Value> key;
    for (int c : p.bound) key.push_back(assignment[p.var[c]]);
    auto it = p.index.find(key_of(key));
    if (it == p.index.end()) return;
    for (auto r : it->second) {
      const auto& row = p.rel->rows[r];
      // A variable repeated inside one atom must take equal values.
      bool ok = true;
      std::vector<bool> set_here(vars.size(), false);
      for (std::size_t c = 0; c < row.size() && ok; ++c) {
        const int v = p.var[c];
        if (std::find(p.bound.begin(), p.bound.end(), static_cast<int>(c)) != p.bound.end()) continue;
        if (set_here[v]) {
          ok = canonical_text(assignment[v]) == canonical_text(row[c]);
          continue;
        }
        set_here[v] = true;
        assignment[v] = row[c];
      }
      if (ok) self(self, k + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::uint64_t true_cardinality(const ConjunctiveQuery& q, const TinyDatabase& db) {
  const auto rows = evaluate_join(q, db);
  if (q.is_full()) return rows.size();
  const auto vars = q.variables();
  std::vector<std::size_t> keep;
  for (const auto& g : q.groupby)
    keep.push_back(static_cast<std::size_t>(std::find(vars.begin(), vars.end(), g) - vars.begin()));
  std::set<std::vector<std::string>> distinct;
  for (const auto& row : rows) {
    std::vector<std::string> key;
    for (auto k : keep) key.push_back(canonical_text(row[k]));
    distinct.insert(std::move(key));
  }
  return distinct.size();
}

EntropyVector EntropyVector::consolidated(const Consolidation& c) const {
  EntropyVector out;
  out.variables = c.shape.variables;
  const int n = c.shape.size();
  out.h = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
  for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
    VarSet original;
    for (int g : VarSet(s).indices())
      for (int m : c.members[g]) original |= VarSet::singleton(m);
    out.h[static_cast<Eigen::Index>(s)] = at(original);
  }
  return out;
}

EntropyVector empirical_entropies(const ConjunctiveQuery& q, const TinyDatabase& db) {
  EntropyVector out;
  out.variables = q.variables();
  const int n = static_cast<int>(out.variables.size());
  if (n > 12) throw OracleError("empirical entropies need at most 12 variables");
  const auto rows = evaluate_join(q, db);
  if (rows.empty()) throw OracleError("empty output has no uniform distribution");

  // Dictionary-encode each column.
  const std::size_t count = rows.size();
  std::vector<std::vector<int>> code(n, std::vector<int>(count));
  for (int v = 0; v < n; ++v) {
    std::unordered_map<std::string, int> dict;
    for (std::size_t t = 0; t < count; ++t)
      code[v][t] = dict.try_emplace(canonical_text(rows[t][v]), static_cast<int>(dict.size())).first->second;
  }

  out.h = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
  const double total = static_cast<double>(count);
  auto entropy = [&](const std::vector<int>& labels, int classes) {
    std::vector<std::uint64_t> freq(classes, 0);
    for (int l : labels) ++freq[l];
    double h = 0;
    for (auto f : freq)
      if (f) h -= (f / total) * std::log2(f / total);
    return h;
  };
  // Refine the partition one variable at a time, depth-first over subsets.
  auto rec = [&](auto&& self, VarSet s, const std::vector<int>& labels, int next) -> void {
    for (int i = next; i < n; ++i) {
      std::unordered_map<std::uint64_t, int> ids;
      std::vector<int> refined(count);
      for (std::size_t t = 0; t < count; ++t) {
        const std::uint64_t key = (static_cast<std::uint64_t>(labels[t]) << 32) | static_cast<std::uint32_t>(code[i][t]);
        refined[t] = ids.try_emplace(key, static_cast<int>(ids.size())).first->second;
      }
      const VarSet si = s | VarSet::singleton(i);
      out.h[static_cast<Eigen::Index>(si.bits())] = entropy(refined, static_cast<int>(ids.size()));
      self(self, si, refined, i + 1);
    }
  };
  rec(rec, VarSet{}, std::vector<int>(count, 0), 0);
  return out;
}

std::vector<std::uint64_t> brute_force_degrees(const RelationData& r, const std::vector<std::string>& u,
                                               const std::vector<std::string>& v, const PredicateExpr* predicate) {
  std::set<std::pair<std::vector<std::string>, std::vector<std::string>>> projected;
  for (const auto& row : r.rows) {
    auto cell = [&](const std::string& col) -> const Value& { return row[r.require_column(col)]; };
    if (predicate && !predicate->matches(cell)) continue;
    std::vector<std::string> uk, vk;
    for (const auto& c : u) uk.push_back(canonical_text(cell(c)) + (is_null(cell(c)) ? "\x01" : ""));
    for (const auto& c : v) vk.push_back(canonical_text(cell(c)) + (is_null(cell(c)) ? "\x01" : ""));
    projected.emplace(std::move(uk), std::move(vk));
  }
  std::map<std::vector<std::string>, std::uint64_t> count;
  for (const auto& [uk, vk] : projected) ++count[uk];
  std::vector<std::uint64_t> out;
  for (const auto& [_, c] : count) out.push_back(c);
  std::sort(out.rbegin(), out.rend());
  return out;
}

NormSet exact_filtered_norms(const RelationData& r, const std::optional<std::string>& u,
                             const std::vector<std::string>& v, const PredicateExpr* predicate,
                             const std::vector<PNorm>& ps) {
  DegreeSequence d;
  d.degrees = brute_force_degrees(r, u ? std::vector<std::string>{*u} : std::vector<std::string>{}, v, predicate);
  return NormSet::of(d, ps);
}

std::vector<std::string> statistic_violations(const EntropyVector& h, const std::vector<StatConstraint>& stats,
                                              double tol) {
  std::vector<std::string> out;
  for (const auto& s : stats) {
    const double lhs = s.p.inverse() * h.at(s.u) + h.at(s.uv) - h.at(s.u);
    if (lhs > s.log2_value + tol) {
      char buf[160];
      std::snprintf(buf, sizeof buf, " p=%s: %.12g > %.12g", s.p.to_string().c_str(), lhs, s.log2_value);
      out.push_back(s.key.display() + " on " + s.atom_label + buf);
    }
  }
  return out;
}

std::vector<std::string> shannon_violations(const EntropyVector& h, double tol) {
  std::vector<std::string> out;
  const int n = static_cast<int>(h.variables.size());
  const VarSet all = VarSet::first(n);
  for (int i = 0; i < n; ++i) {
    if (h.at(all) - h.at(all - VarSet::singleton(i)) < -tol) out.push_back("monotonicity at " + h.variables[i]);
    for (int j = i + 1; j < n; ++j) {
      const VarSet xi = VarSet::singleton(i), xj = VarSet::singleton(j);
      for_each_subset(all - xi - xj, [&](VarSet w) {
        if (h.at(w | xi) + h.at(w | xj) - h.at(w | xi | xj) - h.at(w) < -tol)
          out.push_back("submodularity " + h.variables[i] + "," + h.variables[j]);
      });
    }
  }
  return out;
}

std::vector<StatConstraint> catalog_statistics(const ConjunctiveQuery& q, const Catalog& c) {
  const auto shape = shape_of(q);
  std::vector<StatConstraint> out;
  for (std::size_t j = 0; j < q.atoms.size(); ++j) {
    const auto* rel = c.relation(q.atoms[j].relation);
    if (!rel) continue;
    auto var_of = [&](const std::string& col) { return VarSet::singleton(shape.column_var[j][*rel->column_index(col)]); };
    for (const auto& key : c.whole_keys(rel->name)) {
      const auto& norms = *c.find(key);
      VarSet u = key.u ? var_of(*key.u) : VarSet{};
      VarSet uv = u;
      for (const auto& v : key.v) uv |= var_of(v);
      for (const auto& [p, value] : norms.values) {
        if (value <= 0) continue;
        auto s = StatConstraint::make(j, u, uv, p, value);
        s.key = key;
        s.atom_label = q.atoms[j].label();
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

SoundnessReport check_soundness(const ConjunctiveQuery& q, const TinyDatabase& db, const Catalog& c,
                                const EstimateOptions& options) {
  SoundnessReport rep;
  const auto est = estimate(q, c, options);
  rep.bound = est.bound;
  rep.method = est.method;
  rep.truth = true_cardinality(q, db);
  rep.sound = est.bound * (1 + 1e-9) + 1e-9 >= static_cast<double>(rep.truth);
  if (!rep.sound)
    rep.violations.push_back("bound " + std::to_string(est.bound) + " below true cardinality " +
                             std::to_string(rep.truth));
  if (rep.truth == 0 || q.variables().size() > 12) return rep;

  // Without the group-by the same data witnesses the full join.
  ConjunctiveQuery full = q;
  full.groupby = full.variables();
  const auto h = empirical_entropies(full, db);
  const auto qs = collect_statistics(q, c, options);
  if (qs.empty_statistic) {
    rep.violations.push_back("empty statistic " + *qs.empty_statistic + " on a non-empty output");
    return rep;
  }
  const auto hc = h.consolidated(qs.consolidation);
  rep.entropy_checked = true;
  for (auto& v : statistic_violations(hc, qs.stats)) rep.violations.push_back(std::move(v));
  for (auto& v : shannon_violations(hc)) rep.violations.push_back(std::move(v));
  return rep;
}

}  // namespace lpbound
