#include <algorithm>
#include <cmath>
#include <limits>

#include "lpbound/bounds.hpp"
#include "lpbound/log.hpp"

namespace lpbound {

namespace {

constexpr double kWeightFloor = 1e-9;

std::string semantics_for(Method m, bool full) {
  if (full) return "full join";
  switch (m) {
    case Method::base: return "group-by objective h(V0)";
    case Method::berge: return "full query after dropping private non-output variables";
    case Method::flow: return "flows to group-by variables";
    case Method::td: return "full-join relaxation";
  }
  return {};
}

std::vector<std::string> split_members(const std::string& name) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = name.find('+', start);
    out.push_back(name.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

}  // namespace

void extract_qinequality(const BoundLp& blp, const LpSolution& sol, const std::vector<StatConstraint>& stats,
                         BoundResult& out) {
  if (sol.status != LpStatus::optimal) throw BoundError("q-inequality needs an optimal solution");
  out.q_inequality.clear();
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const int idx = blp.stat_index[k];
    if (idx < 0) continue;
    const double w = blp.method == Method::flow ? sol.primal[idx] : sol.dual[idx];
    if (w <= kWeightFloor) continue;
    const auto& s = stats[k];
    QTerm t;
    t.key = s.key;
    t.atom = s.atom_label;
    t.p = s.p;
    t.norm = s.norm;
    t.weight = w;
    t.full = s.full && s.u.empty();
    t.provenance = s.provenance == "whole" ? "" : s.provenance;
    out.q_inequality.push_back(std::move(t));
  }

  out.method_rows.clear();
  if (blp.method == Method::base || blp.method == Method::td) {
    std::vector<CertificateRow> cert;
    for (std::size_t r = 0; r < blp.certificate_row.size(); ++r) {
      if (!blp.certificate_row[r]) continue;
      const double s = -sol.dual[r];
      if (s > kWeightFloor) cert.push_back({blp.row_text[r], s});
    }
    out.shannon_certificate = std::move(cert);
  } else if (blp.method == Method::berge) {
    std::vector<bool> is_stat(blp.row_text.size(), false);
    for (int r : blp.stat_index)
      if (r >= 0) is_stat[r] = true;
    for (std::size_t r = 0; r < blp.row_text.size(); ++r)
      if (!is_stat[r] && std::abs(sol.dual[r]) > kWeightFloor) out.method_rows.push_back({blp.row_text[r], sol.dual[r]});
  } else {
    const auto& vars = blp.lp.variables();
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (vars[v].name.starts_with("f[") && sol.primal[v] > kWeightFloor)
        out.method_rows.push_back({vars[v].name, sol.primal[v]});
  }
}

BoundResult bound_from_stats(const QueryShape& q, const std::vector<StatConstraint>& stats, Method method,
                             const LpSolver& solver) {
  BoundResult out;
  out.method = method;
  out.semantics = semantics_for(method, q.is_full());

  QueryShape shape = q;
  std::vector<StatConstraint> used = stats;
  if (method == Method::berge) {
    if (!is_berge_acyclic(q)) throw BoundError("LP_Berge requires a Berge-acyclic query");
    auto r = rewrite_groupby_for_berge(q, stats);
    shape = std::move(r.shape);
    used = std::move(r.stats);
    if (r.dropped > 0)
      out.warnings.push_back(std::to_string(r.dropped) + " statistics do not fit the projected atoms and were dropped");
  } else if (method == Method::td) {
    shape.groupby = shape.all();
  }

  if (const VarSet missing = uncovered_variables(shape, used); !missing.empty()) {
    out.bound = out.log2_bound = std::numeric_limits<double>::infinity();
    for (int i : missing.indices())
      for (auto& m : split_members(shape.variables[i])) out.uncovered.push_back(m);
    return out;
  }

  BoundLp blp;
  switch (method) {
    case Method::base: blp = build_lp_base(shape, used); break;
    case Method::berge: blp = build_lp_berge(shape, used); break;
    case Method::flow: blp = build_lp_flow(shape, used); break;
    case Method::td: blp = build_lp_td(shape, used, find_tree_decomposition(shape)); break;
  }
  out.lp_rows = blp.lp.num_constraints();
  out.lp_columns = blp.lp.num_variables();
  const LpSolution sol = solver ? solver(blp.lp) : solve(blp.lp);
  if (sol.status != LpStatus::optimal) {
    out.bound = out.log2_bound = std::numeric_limits<double>::infinity();
    return out;
  }
  out.log2_bound = sol.objective;
  out.bound = std::exp2(sol.objective);
  extract_qinequality(blp, sol, used, out);
  return out;
}

QueryStats collect_statistics(const ConjunctiveQuery& q, const Catalog& c, const EstimateOptions& options) {
  if (auto problems = validate_query(q, c); !problems.empty()) {
    std::string msg = "invalid query " + q.name + ":";
    for (const auto& p : problems) msg += " " + p + ";";
    msg.pop_back();
    throw BoundError(msg);
  }
  StatsPolicy policy = options.policy;
  if (!q.is_full() && options.domain_for_groupby) policy.domain = true;
  auto resolved = resolve_query_stats(q, c, policy);

  QueryStats out;
  out.consolidation = consolidate_variables(q);
  out.warnings = std::move(resolved.warnings);
  const auto& shape = out.consolidation.shape;
  for (const auto& as : resolved.atoms) {
    const auto j = as.atom;
    const auto* rel = c.relation(q.atoms[j].relation);
    const auto& cols = shape.column_var[j];
    auto position = [&](const std::string& name) { return *rel->column_index(name); };
    std::map<int, int> width;
    for (int g : cols) ++width[g];

    for (const auto& s : as.stats) {
      if (s.selection.norms.is_zero()) {
        out.empty_statistic = s.key.display() + " on " + q.atoms[j].label() +
                              (s.selection.provenance == "whole" ? "" : " [" + s.selection.provenance + "]");
        return out;
      }
      VarSet u;
      if (s.key.u) {
        const int g = cols[position(*s.key.u)];
        if (width[g] != 1) continue;
        u = VarSet::singleton(g);
      }
      std::map<int, int> touched;
      for (const auto& v : s.key.v) ++touched[cols[position(v)]];
      bool whole_groups = true;
      VarSet uv = u;
      for (auto [g, count] : touched) {
        whole_groups = whole_groups && count == width[g];
        uv |= VarSet::singleton(g);
      }
      if (!whole_groups) continue;

      for (const auto& [p, value] : s.selection.norms.values) {
        if (!std::isfinite(value) || value <= 0) continue;
        StatConstraint sc = StatConstraint::make(j, u, uv, p, value);
        sc.key = s.key;
        sc.provenance = s.selection.provenance;
        sc.atom_label = q.atoms[j].label();
        sc.full = uv == shape.atoms[j];
        out.stats.push_back(std::move(sc));
        // Without a conditioning column every p gives the same row.
        if (u.empty()) break;
      }
    }
  }
  return out;
}

BoundResult estimate(const ConjunctiveQuery& q, const Catalog& c, const EstimateOptions& options) {
  QueryStats qs = collect_statistics(q, c, options);
  const auto& shape = qs.consolidation.shape;

  Method method = Method::flow;
  if (options.method) {
    method = *options.method;
  } else if (is_berge_acyclic(shape)) {
    // Every statistic touching a kept variable has to become full after the projection.
    auto r = rewrite_groupby_for_berge(shape, qs.stats);
    if (r.dropped == 0) method = Method::berge;
  }

  log().debug("{}: {} statistics over {} consolidated variables, method {}", q.name, qs.stats.size(),
              shape.variables.size(), to_string(method));
  for (const auto& w : qs.warnings) log().info("{}: {}", q.name, w);

  BoundResult out;
  if (qs.empty_statistic) {
    out.method = method;
    out.bound = 0;
    out.log2_bound = -std::numeric_limits<double>::infinity();
    out.empty_statistic = qs.empty_statistic;
    out.semantics = semantics_for(method, q.is_full());
  } else {
    out = bound_from_stats(shape, qs.stats, method, options.solver);
  }
  out.warnings.insert(out.warnings.begin(), qs.warnings.begin(), qs.warnings.end());
  return out;
}

}  // namespace lpbound
