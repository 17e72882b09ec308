#include "lpbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace lpbound {

StatConstraint StatConstraint::make(std::size_t atom, VarSet u, VarSet uv, PNorm p, double norm) {
  StatConstraint s;
  s.atom = atom;
  s.u = u;
  s.uv = uv | u;
  s.p = p;
  s.norm = norm;
  s.log2_value = std::log2(norm);
  s.full = true;
  return s;
}

std::string describe_set(const QueryShape& shape, VarSet s) {
  if (s.empty()) return "∅";
  std::string out;
  for (int i : s.indices()) {
    if (!out.empty()) out += ",";
    out += shape.variables[i];
  }
  return out;
}

int EntropyVarMap::get(LinearProgram& lp, VarSet s, const QueryShape& shape) {
  auto [it, inserted] = index.try_emplace(s, 0);
  if (inserted) it->second = lp.add_variable("h(" + describe_set(shape, s) + ")");
  return it->second;
}

std::optional<int> EntropyVarMap::find(VarSet s) const {
  auto it = index.find(s);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

namespace {

// Accumulates a linear form over entropy terms, folding h(∅) = 0 and repeated sets.
struct Form {
  std::map<VarSet, double> coef;

  Form& add(VarSet s, double c) {
    if (!s.empty() && c != 0) coef[s] += c;
    return *this;
  }

  std::vector<LpTerm> terms(LinearProgram& lp, EntropyVarMap& h, const QueryShape& q) const {
    std::vector<LpTerm> out;
    for (const auto& [s, c] : coef)
      if (c != 0) out.push_back({h.get(lp, s, q), c});
    return out;
  }

  std::string text(const QueryShape& q, const char* rel, double rhs) const {
    std::string lhs;
    std::string rhs_terms;
    auto put = [&](std::string& side, VarSet s, double c) {
      if (!side.empty()) side += " + ";
      if (c != 1) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g ", c);
        side += buf;
      }
      side += "h(" + describe_set(q, s) + ")";
    };
    for (const auto& [s, c] : coef) {
      if (c > 0) put(lhs, s, c);
      if (c < 0) put(rhs_terms, s, -c);
    }
    if (lhs.empty()) lhs = "0";
    std::string out = lhs + " " + rel + " " + (rhs_terms.empty() ? "" : rhs_terms);
    if (rhs != 0 || rhs_terms.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6g", rhs);
      out += rhs_terms.empty() ? buf : std::string(" + ") + buf;
    }
    return out;
  }
};

Form stat_form(const StatConstraint& s) {
  Form f;
  f.add(s.uv, 1.0);
  f.add(s.u, s.p.inverse() - 1.0);
  return f;
}

void add_row(BoundLp& b, const QueryShape& q, const std::string& name, const Form& f, RowType type, double rhs,
             bool certificate) {
  const char* rel = type == RowType::le ? "<=" : type == RowType::ge ? ">=" : "=";
  b.lp.add_constraint(name + "_" + std::to_string(b.lp.num_constraints()), f.terms(b.lp, b.h, q), type, rhs);
  b.row_text.push_back(f.text(q, rel, rhs));
  b.certificate_row.push_back(certificate);
}

// Shannon rows keep the form "sum >= 0"; render them with the negative side on the right.
void add_stat_rows(BoundLp& b, const QueryShape& q, const std::vector<StatConstraint>& stats) {
  b.stat_index.assign(stats.size(), -1);
  for (std::size_t k = 0; k < stats.size(); ++k) {
    b.stat_index[k] = b.lp.num_constraints();
    add_row(b, q, "stat" + std::to_string(k), stat_form(stats[k]), RowType::le, stats[k].log2_value, false);
  }
}

}  // namespace

BoundLp build_lp_base(const QueryShape& q, const std::vector<StatConstraint>& stats) {
  const int n = q.size();
  if (n > 20)
    throw BoundError("LP_base refuses " + std::to_string(n) + " variables (limit 20); use flow or berge");
  BoundLp b;
  b.method = Method::base;
  b.lp = LinearProgram(Sense::maximize);
  const VarSet all = q.all();
  for (std::uint64_t bits = 1; bits <= all.bits(); ++bits) b.h.get(b.lp, VarSet(bits), q);
  if (!q.groupby.empty()) b.lp.set_objective({{*b.h.find(q.groupby), 1.0}});

  add_stat_rows(b, q, stats);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const VarSet xi = VarSet::singleton(i);
      const VarSet xj = VarSet::singleton(j);
      for_each_subset(all - xi - xj, [&](VarSet w) {
        Form f;
        f.add(w | xi, 1).add(w | xj, 1).add(w | xi | xj, -1).add(w, -1);
        add_row(b, q, "sub", f, RowType::ge, 0, true);
      });
    }
  }
  for (int i = 0; i < n; ++i) {
    Form f;
    f.add(all, 1).add(all - VarSet::singleton(i), -1);
    add_row(b, q, "mono", f, RowType::ge, 0, true);
  }
  return b;
}

BoundLp build_lp_berge(const QueryShape& q, const std::vector<StatConstraint>& stats) {
  if (!is_berge_acyclic(q)) throw BoundError("LP_Berge requires a Berge-acyclic query");
  if (!q.is_full()) throw BoundError("LP_Berge requires a full query; rewrite the group-by first");
  for (const auto& s : stats) {
    if (s.atom >= q.atoms.size() || s.uv != q.atoms[s.atom] || s.u.size() > 1)
      throw BoundError("LP_Berge requires full simple statistics");
  }
  BoundLp b;
  b.method = Method::berge;
  b.lp = LinearProgram(Sense::maximize);
  std::vector<int> occurrences(q.size(), 0);
  for (auto a : q.atoms)
    for (int i : a.indices()) ++occurrences[i];
  Form objective;
  for (auto a : q.atoms) objective.add(a, 1);
  for (int i = 0; i < q.size(); ++i) {
    b.h.get(b.lp, VarSet::singleton(i), q);
    objective.add(VarSet::singleton(i), -(occurrences[i] - 1));
  }
  for (auto a : q.atoms) b.h.get(b.lp, a, q);
  b.lp.set_objective(objective.terms(b.lp, b.h, q));

  add_stat_rows(b, q, stats);
  std::map<VarSet, bool> seen;
  for (auto a : q.atoms) {
    if (a.size() < 2 || seen[a]) continue;
    seen[a] = true;
    Form sum;
    sum.add(a, 1);
    for (int i : a.indices()) sum.add(VarSet::singleton(i), -1);
    add_row(b, q, "add", sum, RowType::le, 0, false);
    for (int i : a.indices()) {
      Form mono;
      mono.add(VarSet::singleton(i), 1).add(a, -1);
      add_row(b, q, "mono", mono, RowType::le, 0, false);
    }
  }
  return b;
}

BergeRewrite rewrite_groupby_for_berge(const QueryShape& q, const std::vector<StatConstraint>& stats) {
  std::vector<int> occurrences(q.size(), 0);
  for (auto a : q.atoms)
    for (int i : a.indices()) ++occurrences[i];
  VarSet removed;
  for (int i = 0; i < q.size(); ++i)
    if (occurrences[i] == 1 && !q.groupby.contains(i)) removed |= VarSet::singleton(i);

  std::vector<int> renumber(q.size(), -1);
  BergeRewrite r;
  for (int i = 0; i < q.size(); ++i) {
    if (removed.contains(i)) continue;
    renumber[i] = r.shape.size();
    r.shape.variables.push_back(q.variables[i]);
  }
  auto map_set = [&](VarSet s) {
    VarSet out;
    for (int i : s.indices())
      if (renumber[i] >= 0) out |= VarSet::singleton(renumber[i]);
    return out;
  };
  std::vector<int> new_atom(q.atoms.size(), -1);
  for (std::size_t j = 0; j < q.atoms.size(); ++j) {
    const VarSet w = q.atoms[j] - removed;
    if (w.empty()) continue;
    new_atom[j] = static_cast<int>(r.atoms.size());
    r.atoms.push_back(j);
    r.shape.atoms.push_back(map_set(w));
    std::vector<int> cols;
    for (int v : q.column_var[j])
      if (renumber[v] >= 0) cols.push_back(renumber[v]);
    r.shape.column_var.push_back(std::move(cols));
  }
  r.shape.groupby = r.shape.all();

  for (const auto& s : stats) {
    const int j = new_atom[s.atom];
    if (j < 0) continue;
    const VarSet w = q.atoms[s.atom] - removed;
    if (s.u.subset_of(w) && w.subset_of(s.uv)) {
      StatConstraint t = s;
      t.atom = static_cast<std::size_t>(j);
      t.u = map_set(s.u);
      t.uv = map_set(w);
      t.full = true;
      r.stats.push_back(std::move(t));
    } else if (!(s.uv & w).empty()) {
      ++r.dropped;
    }
  }
  return r;
}

ConjunctiveQuery rewrite_groupby_for_berge(const ConjunctiveQuery& q) {
  if (q.is_full()) return q;
  std::map<std::string, int> occurrences;
  for (const auto& a : q.atoms)
    for (const auto& v : a.vars) ++occurrences[v];
  auto kept = [&](const std::string& v) {
    return occurrences[v] > 1 || std::find(q.groupby.begin(), q.groupby.end(), v) != q.groupby.end();
  };
  ConjunctiveQuery out;
  out.name = q.name;
  for (const auto& a : q.atoms) {
    Atom b = a;
    b.vars.clear();
    for (const auto& v : a.vars)
      if (kept(v)) b.vars.push_back(v);
    if (b.vars.empty()) continue;
    if (b.vars.size() != a.vars.size()) b.relation += "'";
    out.atoms.push_back(std::move(b));
  }
  out.groupby = out.variables();
  return out;
}

int TreeDecomposition::width() const {
  int w = 0;
  for (auto b : bags) w = std::max(w, b.size());
  return w;
}

std::string TreeDecomposition::check(const QueryShape& q) const {
  const int n = static_cast<int>(bags.size());
  if (n == 0) return q.atoms.empty() ? "" : "no bags";
  if (static_cast<int>(edges.size()) != n - 1) return "edge count is not bags - 1";
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) return "edge endpoint out of range";
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  auto reach = [&](int start, auto&& keep) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{start};
    seen[start] = true;
    int count = 0;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      ++count;
      for (int y : adj[x])
        if (!seen[y] && keep(y)) {
          seen[y] = true;
          stack.push_back(y);
        }
    }
    return count;
  };
  if (reach(0, [](int) { return true; }) != n) return "not connected";
  for (std::size_t j = 0; j < q.atoms.size(); ++j) {
    bool covered = false;
    for (auto b : bags) covered = covered || q.atoms[j].subset_of(b);
    if (!covered) return "atom " + std::to_string(j) + " is in no bag";
  }
  for (int v = 0; v < q.size(); ++v) {
    int first = -1;
    int holding = 0;
    for (int t = 0; t < n; ++t)
      if (bags[t].contains(v)) {
        ++holding;
        if (first < 0) first = t;
      }
    if (holding == 0) continue;
    if (reach(first, [&](int t) { return bags[t].contains(v); }) != holding)
      return "bags holding " + q.variables[v] + " are not connected";
  }
  return {};
}

TreeDecomposition find_tree_decomposition(const QueryShape& q) {
  const int n = q.size();
  std::vector<VarSet> adj(n);
  for (auto a : q.atoms)
    for (int i : a.indices()) adj[i] |= a - VarSet::singleton(i);

  VarSet remaining = q.all();
  std::vector<int> order;
  std::vector<VarSet> bag_of(n);
  while (!remaining.empty()) {
    int best = -1;
    long best_fill = 0;
    int best_degree = 0;
    for (int v : remaining.indices()) {
      const VarSet nb = adj[v] & remaining;
      long fill = 0;
      for (int a : nb.indices()) fill += (nb - adj[a] - VarSet::singleton(a)).size();
      fill /= 2;
      if (best < 0 || fill < best_fill || (fill == best_fill && nb.size() < best_degree)) {
        best = v;
        best_fill = fill;
        best_degree = nb.size();
      }
    }
    const VarSet nb = adj[best] & remaining;
    for (int a : nb.indices()) adj[a] |= nb - VarSet::singleton(a);
    bag_of[best] = nb | VarSet::singleton(best);
    order.push_back(best);
    remaining = remaining - VarSet::singleton(best);
  }

  std::vector<int> position(n);
  for (int k = 0; k < n; ++k) position[order[k]] = k;
  std::vector<int> parent(n, -1);
  for (int k = 0; k < n; ++k) {
    const int v = order[k];
    int next = -1;
    for (int a : (bag_of[v] - VarSet::singleton(v)).indices())
      if (next < 0 || position[a] < position[next]) next = a;
    parent[k] = next < 0 ? -1 : position[next];
  }

  // Contract bags contained in their parent; children move up.
  std::vector<VarSet> bags(n);
  for (int k = 0; k < n; ++k) bags[k] = bag_of[order[k]];
  std::vector<bool> alive(n, true);
  for (int k = 0; k < n; ++k) {
    const int p = parent[k];
    if (p < 0) continue;
    if (bags[k].subset_of(bags[p])) {
      alive[k] = false;
      for (int c = 0; c < n; ++c)
        if (parent[c] == k) parent[c] = p;
    } else if (bags[p].subset_of(bags[k])) {
      // The parent is absorbed: the child takes its bag slot and its parent.
      bags[p] = bags[k];
      alive[k] = false;
      for (int c = 0; c < n; ++c)
        if (parent[c] == k) parent[c] = p;
    }
  }

  TreeDecomposition td;
  std::vector<int> id(n, -1);
  for (int k = 0; k < n; ++k)
    if (alive[k]) {
      id[k] = static_cast<int>(td.bags.size());
      td.bags.push_back(bags[k]);
    }
  int previous_root = -1;
  for (int k = 0; k < n; ++k) {
    if (!alive[k]) continue;
    if (parent[k] >= 0) {
      td.edges.emplace_back(id[k], id[parent[k]]);
    } else {
      if (previous_root >= 0) td.edges.emplace_back(previous_root, id[k]);
      previous_root = id[k];
    }
  }
  return td;
}

BoundLp build_lp_td(const QueryShape& q, const std::vector<StatConstraint>& stats, const TreeDecomposition& td) {
  if (td.width() > 12)
    throw BoundError("LP_TD refuses bag width " + std::to_string(td.width()) + " (limit 12)");
  if (auto err = td.check(q); !err.empty()) throw BoundError("invalid tree decomposition: " + err);
  for (const auto& s : stats) {
    bool inside = false;
    for (auto bag : td.bags) inside = inside || s.uv.subset_of(bag);
    if (!inside) throw BoundError("statistic " + s.key.display() + " does not fit in a bag");
  }
  BoundLp b;
  b.method = Method::td;
  b.lp = LinearProgram(Sense::maximize);
  for (auto bag : td.bags)
    for_each_subset(bag, [&](VarSet s) {
      if (!s.empty()) b.h.get(b.lp, s, q);
    });
  Form objective;
  for (auto bag : td.bags) objective.add(bag, 1);
  for (auto [x, y] : td.edges) objective.add(td.bags[x] & td.bags[y], -1);
  b.lp.set_objective(objective.terms(b.lp, b.h, q));

  add_stat_rows(b, q, stats);
  // Normality on each bag V: every Möbius coefficient of the step-function expansion is >= 0,
  // c_Z = Σ_{W ⊆ Z} (-1)^{|Z|-|W|+1} h(V \ W) for nonempty Z ⊆ V.
  std::map<std::map<VarSet, double>, bool> emitted;
  for (auto bag : td.bags) {
    for_each_subset(bag, [&](VarSet z) {
      if (z.empty()) return;
      Form f;
      for_each_subset(z, [&](VarSet w) {
        const double sign = ((z.size() - w.size() + 1) % 2 == 0) ? 1.0 : -1.0;
        f.add(bag - w, sign);
      });
      if (emitted[f.coef]) return;
      emitted[f.coef] = true;
      add_row(b, q, "normal", f, RowType::ge, 0, true);
    });
  }
  return b;
}

}  // namespace lpbound
