// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any criterion fails.
// Tolerances and budgets below are fixed; they are part of the criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "generators.hpp"
#include "lpbound/catalog_io.hpp"
#include "lpbound/ingest.hpp"
#include "lpbound/oracle.hpp"
#include "lpbound/predicates.hpp"
#include "lpbound/queryfmt.hpp"
#include "test_support.hpp"

namespace lpbound {
namespace {

constexpr double kLogTol = 1e-6;
constexpr double kRelTol = 1e-6;
constexpr double kEntropyTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Every optimal solve from every suite, for the reconstruction criterion.
std::vector<BoundResult> g_solves;

BoundResult solve(const QueryShape& shape, const std::vector<StatConstraint>& stats, Method m) {
  auto r = bound_from_stats(shape, stats, m);
  if (!r.is_infinite()) g_solves.push_back(r);
  return r;
}

double weight_of(const BoundResult& r, const std::string& atom) {
  double w = 0;
  for (const auto& t : r.q_inequality)
    if (t.atom == atom) w += t.weight;
  return w;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

Outcome agm() {
  Outcome o;
  const auto s = test::make_shape({"X", "Y", "Z"}, {{"X", "Y"}, {"Y", "Z"}, {"Z", "X"}});
  const std::vector<StatConstraint> stats = {test::named_stat(s, {}, {"X", "Y"}, 1, 3),
                                             test::named_stat(s, {}, {"Y", "Z"}, 1, 3),
                                             test::named_stat(s, {}, {"Z", "X"}, 1, 3)};
  const double expected = std::pow(8.0, 1.5);
  const auto t0 = Clock::now();
  std::string bounds;
  for (Method m : {Method::base, Method::flow, Method::td}) {
    const auto r = solve(s, stats, m);
    bounds += fmt::format(" {}={:.7g}", to_string(m), r.bound);
    if (!(std::abs(r.bound - expected) <= kRelTol * expected)) o.fail(fmt::format("{} gave {}", to_string(m), r.bound));
  }
  const double ms = millis_since(t0);
  if (ms >= 100) o.fail(fmt::format("took {:.1f} ms", ms));
  if (o.pass) o.detail = fmt::format("8^1.5 = {:.7g};{} in {:.1f} ms", expected, bounds, ms);
  return o;
}

Outcome integral_cover() {
  Outcome o;
  const auto s = test::make_shape({"X", "Y", "Z", "U"}, {{"X", "Y"}, {"Y", "Z"}, {"Z", "U"}});
  const double log_m = std::log2(1000.0);
  const std::vector<StatConstraint> stats = {test::named_stat(s, {}, {"X", "Y"}, 1, log_m),
                                             test::named_stat(s, {}, {"Y", "Z"}, 1, log_m),
                                             test::named_stat(s, {}, {"Z", "U"}, 1, log_m)};
  for (Method m : {Method::base, Method::berge}) {
    const auto r = solve(s, stats, m);
    const double w[3] = {weight_of(r, "A0"), weight_of(r, "A1"), weight_of(r, "A2")};
    if (!rel_close(r.bound, 1e6, kRelTol)) o.fail(fmt::format("{} bound {}", to_string(m), r.bound));
    if (std::abs(w[0] - 1) > kLogTol || std::abs(w[1]) > kLogTol || std::abs(w[2] - 1) > kLogTol)
      o.fail(fmt::format("{} weights ({}, {}, {})", to_string(m), w[0], w[1], w[2]));
  }
  if (o.pass) o.detail = "M = 1000: bound 1e6 with weights (1, 0, 1) under base and berge";
  return o;
}

std::vector<test::SyntheticInstance> g_berge_suite;

Outcome theorem2() {
  Outcome o;
  std::mt19937_64 rng(test::test_seed("acceptance_theorem2", 2));
  double worst = 0;
  const auto t0 = Clock::now();
  for (int k = 0; k < 50; ++k) {
    g_berge_suite.push_back(test::random_berge_instance(rng, 6, 3));
    const auto& inst = g_berge_suite.back();
    const auto base = solve(inst.shape, inst.stats, Method::base);
    const auto berge = solve(inst.shape, inst.stats, Method::berge);
    const double gap = std::abs(base.log2_bound - berge.log2_bound);
    worst = std::max(worst, gap);
    if (!(gap < kLogTol)) o.fail(fmt::format("instance {}: base {} berge {}", k, base.log2_bound, berge.log2_bound));
  }
  const double s = millis_since(t0) / 1000;
  if (s >= 60) o.fail(fmt::format("took {:.1f} s", s));
  if (o.pass) o.detail = fmt::format("50 instances, max gap {:.2e}, {:.1f} s", worst, s);
  return o;
}

Outcome theorem3() {
  Outcome o;
  std::mt19937_64 rng(test::test_seed("acceptance_theorem3", 3));
  double worst = 0;
  int cyclic = 0;
  int infinite = 0;
  for (int k = 0; k < 50; ++k) {
    const auto inst = test::random_simple_instance(rng, 5);
    cyclic += !is_berge_acyclic(inst.shape);
    const auto base = solve(inst.shape, inst.stats, Method::base);
    const auto flow = solve(inst.shape, inst.stats, Method::flow);
    if (base.is_infinite() || flow.is_infinite()) {
      ++infinite;
      if (base.is_infinite() != flow.is_infinite()) o.fail(fmt::format("instance {}: only one bound is infinite", k));
      continue;
    }
    const double gap = std::abs(base.log2_bound - flow.log2_bound);
    worst = std::max(worst, gap);
    if (!(gap < kLogTol)) o.fail(fmt::format("instance {}: base {} flow {}", k, base.log2_bound, flow.log2_bound));
  }
  if (cyclic == 0) o.fail("suite has no cyclic query");
  if (o.pass)
    o.detail = fmt::format("50 instances ({} not Berge-acyclic, {} unbounded in both), max gap {:.2e}", cyclic,
                           infinite, worst);
  return o;
}

Outcome theorem_a2() {
  Outcome o;
  double worst = 0;
  int max_width = 0;
  for (std::size_t k = 0; k < g_berge_suite.size(); ++k) {
    const auto& inst = g_berge_suite[k];
    max_width = std::max(max_width, find_tree_decomposition(inst.shape).width());
    const auto base = bound_from_stats(inst.shape, inst.stats, Method::base);
    const auto td = solve(inst.shape, inst.stats, Method::td);
    const double gap = std::abs(base.log2_bound - td.log2_bound);
    worst = std::max(worst, gap);
    if (!(gap < kLogTol)) o.fail(fmt::format("instance {}: base {} td {}", k, base.log2_bound, td.log2_bound));
  }
  if (g_berge_suite.size() != 50) o.fail("Theorem-2 suite missing");
  if (o.pass) o.detail = fmt::format("{} instances, max bag size {}, max gap {:.2e}", g_berge_suite.size(), max_width, worst);
  return o;
}

StatsConfig small_config() {
  StatsConfig cfg;
  cfg.mcv_count = 3;
  cfg.histogram_bottom_buckets = 4;
  return cfg;
}

Outcome soundness() {
  Outcome o;
  std::mt19937_64 rng(test::test_seed("acceptance_soundness", 6));
  int checked = 0;
  int entropy = 0;
  int nonempty = 0;
  double worst_ratio = kInf;
  const auto t0 = Clock::now();
  for (int k = 0; k < 200; ++k) {
    const auto rels = test::random_database(rng);
    const auto q = test::random_query(rng, rels);
    try {
      const TinyDatabase db(rels);
      const auto c = build_statistics(rels, small_config());
      const auto rep = check_soundness(q, db, c);
      ++checked;
      entropy += rep.entropy_checked;
      if (rep.truth > 0) {
        ++nonempty;
        worst_ratio = std::min(worst_ratio, rep.bound / static_cast<double>(rep.truth));
      }
      if (!rep.ok())
        o.fail(fmt::format("{}: bound {} truth {} {}", print_query(q), rep.bound, rep.truth,
                           rep.violations.empty() ? "" : rep.violations.front()));
    } catch (const std::exception& e) {
      o.fail(fmt::format("{}: {}", print_query(q), e.what()));
    }
  }
  const double s = millis_since(t0) / 1000;
  if (s >= 300) o.fail(fmt::format("took {:.1f} s", s));
  if (o.pass)
    o.detail = fmt::format("{} triples ({} non-empty, {} entropy-checked), min bound/truth {:.3g}, {:.1f} s", checked,
                           nonempty, entropy, worst_ratio, s);
  return o;
}

Outcome eq7() {
  Outcome o;
  std::mt19937_64 rng(test::test_seed("acceptance_eq7", 7));
  int catalogs = 0;
  std::size_t rows = 0;
  for (int attempt = 0; catalogs < 20 && attempt < 1000; ++attempt) {
    const auto rels = test::random_database(rng);
    auto q = test::random_query(rng, rels);
    for (auto& a : q.atoms) a.predicate.reset();
    q.groupby = q.variables();
    const TinyDatabase db(rels);
    if (true_cardinality(q, db) == 0) continue;
    const auto c = build_statistics(rels, small_config());
    const auto h = empirical_entropies(q, db);
    const auto stats = catalog_statistics(q, c);
    rows += stats.size();
    const auto bad = statistic_violations(h, stats, kEntropyTol);
    if (!bad.empty()) o.fail(print_query(q) + ": " + bad.front());
    const auto shannon = shannon_violations(h, kEntropyTol);
    if (!shannon.empty()) o.fail(print_query(q) + ": " + shannon.front());
    ++catalogs;
  }
  if (catalogs < 20) o.fail(fmt::format("only {} catalogs with a non-empty output", catalogs));
  if (o.pass) o.detail = fmt::format("{} catalogs, {} statistic rows, all within {:g}", catalogs, rows, kEntropyTol);
  return o;
}

bool all_monotone(const Catalog& c, Outcome& o) {
  for (const auto& [key, norms] : c.stats)
    if (!norms.is_monotone()) {
      o.fail("non-monotone norms for " + key.display());
      return false;
    }
  return true;
}

void round_trip(const Catalog& c, const std::string& name, Outcome& o) {
  const auto text = serialize_catalog(c);
  const auto back = deserialize_catalog(text);
  if (!(back == c) || serialize_catalog(back) != text) o.fail(name + " catalog does not round-trip");
}

Outcome statistics_goldens() {
  Outcome o;
  const auto fig3 = load_database(load_manifest("data/fig3/schema.json")).front();
  using Seq = std::vector<std::uint64_t>;
  if (compute_degree_sequence(fig3, "X", {"Y", "Z"}).degrees != Seq{3, 2, 2, 1}) o.fail("deg(YZ|X)");
  if (compute_degree_sequence(fig3, "X", {"Y"}).degrees != Seq{2, 2, 2, 1}) o.fail("deg(Y|X)");
  if (brute_force_degrees(fig3, {"X", "Y"}, {"Z"}) != Seq{2, 1, 1, 1, 1, 1, 1}) o.fail("deg(Z|XY)");
  if (compute_degree_sequence(fig3, std::nullopt, {"X", "Y", "Z"}).degrees != Seq{8}) o.fail("deg(XYZ|∅)");

  std::size_t sets = 0;
  const auto c3 = build_statistics({fig3}, StatsConfig{});
  const auto toy_manifest = load_manifest("data/toy/schema.json");
  const auto toy = build_statistics(load_database(toy_manifest), config_from_manifest(toy_manifest));
  for (const auto* c : {&c3, &toy}) {
    all_monotone(*c, o);
    sets += c->stats.size();
  }
  round_trip(c3, "fig3", o);
  round_trip(toy, "toy", o);
  std::mt19937_64 rng(test::test_seed("acceptance_catalogs", 8));
  for (int k = 0; k < 10; ++k) {
    const auto c = build_statistics(test::random_database(rng), small_config());
    all_monotone(c, o);
    round_trip(c, "random", o);
    sets += c.stats.size();
  }
  if (o.pass) o.detail = fmt::format("four sequences exact; {} norm sets monotone; 12 catalogs round-trip", sets);
  return o;
}

NormSet norms(double l0, double l1, double l2, double linf) {
  NormSet n;
  n.ell0 = l0;
  n.values = {{PNorm(1), l1}, {PNorm(2), l2}, {PNorm::infinity(), linf}};
  return n;
}

Outcome predicate_algebra() {
  Outcome o;
  if (!(combine_conjunction({norms(4, 10, 6, 5), norms(6, 8, 7, 3)}) == norms(4, 8, 6, 3))) o.fail("conjunction");
  if (!(combine_disjunction({norms(4, 10, 6, 5), norms(6, 8, 7, 3)}) == norms(10, 18, 13, 8))) o.fail("disjunction");
  if (prefix_exponent_for(5, {0, 2, 4}) != 4 || prefix_exponent_for(17, {0, 2, 4}) != std::nullopt)
    o.fail("prefix exponent");

  std::mt19937_64 rng(test::test_seed("acceptance_envelopes", 9));
  int instances = 0;
  for (int k = 0; k < 50; ++k) {
    const auto r = test::random_relation(rng, "R", 3, 120, 16, k % 4 == 3);
    StatsConfig cfg;
    cfg.mcv_count = 1 + k % 4;
    cfg.histogram_bottom_buckets = 2 << (k % 4);
    const auto c = build_statistics({r}, cfg);
    const auto pred = test::random_predicate(rng, {r.columns[1], r.columns[2]}, 16, 2);
    for (const std::optional<std::string>& u : {std::optional<std::string>{}, std::optional<std::string>{"A"}}) {
      const std::vector<std::string> v = u ? std::vector<std::string>{"B", "C"} : std::vector<std::string>{"A", "B", "C"};
      std::vector<std::string> warnings;
      const auto sel = evaluate_predicate(c, "R", pred, u, "", warnings);
      if (!sel) {
        o.fail("no selection for " + print_predicate(pred, "R"));
        continue;
      }
      const auto exact = exact_filtered_norms(r, u, v, &pred, cfg.p_set);
      if (!dominated_by(exact, sel->norms, 1e-12) || exact.ell0 > sel->norms.ell0)
        o.fail(print_predicate(pred, "R") + " exceeds its envelope " + sel->provenance);
    }
    ++instances;
  }
  if (o.pass) o.detail = fmt::format("min/sum rules hold; {} random predicates enveloped (conditioned and not)", instances);
  return o;
}

double reconstructed(const BoundResult& r) {
  double s = 0;
  for (const auto& t : r.q_inequality) s += t.weight * std::log2(t.norm);
  return s;
}

Outcome reconstruction() {
  Outcome o;
  double worst = 0;
  for (const auto& r : g_solves) {
    const double err = std::abs(reconstructed(r) - r.log2_bound) / std::max(1.0, std::abs(r.log2_bound));
    worst = std::max(worst, err);
    if (!(err <= kRelTol)) o.fail(fmt::format("{}: {} vs {}", to_string(r.method), reconstructed(r), r.log2_bound));
  }
  if (g_solves.empty()) o.fail("no solves recorded");
  if (o.pass) o.detail = fmt::format("{} optimal solves, max relative error {:.2e}", g_solves.size(), worst);
  return o;
}

double median_millis(const std::function<void()>& f, int runs = 5) {
  std::vector<double> t;
  for (int i = 0; i < runs; ++i) {
    const auto t0 = Clock::now();
    f();
    t.push_back(millis_since(t0));
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

std::vector<StatConstraint> rich_stats(const QueryShape& s) {
  std::vector<StatConstraint> st;
  for (std::size_t j = 0; j < s.atoms.size(); ++j) {
    const auto vars = s.atoms[j].indices();
    st.push_back(StatConstraint::make(j, VarSet{}, s.atoms[j], PNorm(1), std::exp2(20.0)));
    for (int x : vars) {
      for (double p : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, kInf}) {
        const double lg = 2 + x % 3 + 17 / (std::isinf(p) ? 20 : p);
        st.push_back(StatConstraint::make(j, VarSet::singleton(x), s.atoms[j], PNorm(p), std::exp2(lg)));
      }
    }
  }
  for (auto& c : st) c.key.relation = "A" + std::to_string(c.atom);
  return st;
}

Outcome performance() {
  Outcome o;
  // A chain and a snowflake, 14 atoms each.
  std::vector<std::string> vars;
  for (int i = 0; i < 16; ++i) vars.push_back("V" + std::to_string(i));
  std::vector<std::vector<std::string>> chain, snow;
  for (int i = 0; i < 14; ++i) chain.push_back({vars[i], vars[i + 1]});
  for (int i = 1; i <= 4; ++i) snow.push_back({vars[0], vars[i]});
  for (int i = 5; i <= 14; ++i) snow.push_back({vars[1 + (i - 5) % 4], vars[i]});
  double berge_ms = 0;
  for (const auto& atoms : {chain, snow}) {
    std::vector<std::string> used(vars.begin(), vars.begin() + 15);
    const auto s = test::make_shape(used, atoms);
    const auto st = rich_stats(s);
    BoundResult r;
    const double ms = median_millis([&] { r = bound_from_stats(s, st, Method::berge); });
    if (r.is_infinite()) o.fail("berge bound is infinite");
    berge_ms = std::max(berge_ms, ms);
  }
  if (berge_ms >= 10) o.fail(fmt::format("LP_Berge 14 atoms took {:.2f} ms", berge_ms));

  std::mt19937_64 rng(test::test_seed("acceptance_performance", 11));
  double base_ms = 0;
  for (int k = 0; k < 3; ++k) {
    const auto inst = test::random_simple_instance(rng, 10, 10);
    const auto t0 = Clock::now();
    solve(inst.shape, inst.stats, Method::base);
    base_ms = std::max(base_ms, millis_since(t0));
  }
  if (base_ms >= 5000) o.fail(fmt::format("LP_base on 10 variables took {:.0f} ms", base_ms));

  double flow_ms = 0;
  for (int k = 0; k < 5; ++k) {
    const auto inst = test::random_simple_instance(rng, 15, 15);
    BoundResult r;
    flow_ms = std::max(flow_ms, median_millis([&] { r = bound_from_stats(inst.shape, inst.stats, Method::flow); }, 3));
    if (!r.is_infinite()) g_solves.push_back(r);
  }
  if (flow_ms >= 200) o.fail(fmt::format("LP_flow on 15 variables took {:.1f} ms", flow_ms));
  if (o.pass)
    o.detail = fmt::format("berge 14 atoms {:.2f} ms; base 10 vars {:.0f} ms; flow 15 vars {:.1f} ms", berge_ms,
                           base_ms, flow_ms);
  return o;
}

}  // namespace
}  // namespace lpbound

int main() {
  using namespace lpbound;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // Reconstruction runs after the suites that record solves, and performance feeds it too.
  const std::vector<Criterion> criteria = {
      {1, "AGM reproduction", agm},
      {2, "integral cover on J3", integral_cover},
      {3, "base equals berge (50 Berge-acyclic queries)", theorem2},
      {4, "base equals flow (50 simple-statistic queries)", theorem3},
      {5, "td equals base (Berge suite)", theorem_a2},
      {6, "soundness harness (200 triples)", soundness},
      {7, "statistic inequalities on empirical entropies", eq7},
      {8, "statistics goldens, monotone norms, catalog round trip", statistics_goldens},
      {9, "predicate algebra and envelopes", predicate_algebra},
      {11, "performance", performance},
      {10, "q-inequality reconstruction", reconstruction},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("[%s] %2d. %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
