#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "lpbound/bounds.hpp"
#include "lpbound/catalog_io.hpp"
#include "lpbound/ingest.hpp"
#include "lpbound/oracle.hpp"
#include "lpbound/queryfmt.hpp"

namespace fs = std::filesystem;
using namespace lpbound;

namespace {

constexpr int kCsvVersion = 1;
// LP_base grows as 2^n; the command line keeps it to sizes that finish in seconds.
constexpr std::size_t kCliBaseLimit = 10;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string data;
  std::string catalog;
  std::string queries;
  std::string query;
  std::string out;
  std::string method = "auto";
  std::string p_set;
  int mcv = -1;
  int buckets = -1;
  std::uint64_t seed = 1;
  int threads = 1;
  bool json = false;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

fs::path manifest_path(const std::string& data) {
  if (data.empty()) throw UsageError("--data is required");
  const fs::path p(data);
  if (fs::is_regular_file(p)) return p;
  if (!fs::is_directory(p)) throw UsageError("no such data directory: " + data);
  if (fs::exists(p / "schema.json")) return p / "schema.json";
  if (fs::is_empty(p)) throw UsageError("no relations in " + data);
  throw UsageError("missing schema.json in " + data);
}

std::vector<RelationData> load_data(const std::string& data, SchemaManifest* manifest_out = nullptr) {
  const auto manifest = load_manifest(manifest_path(data));
  if (manifest.relations.empty()) throw UsageError("no relations in " + data);
  if (manifest_out) *manifest_out = manifest;
  return load_database(manifest);
}

std::vector<std::optional<Method>> parse_methods(const std::string& text) {
  std::vector<std::optional<Method>> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    if (tok == "auto") {
      out.push_back(std::nullopt);
    } else if (auto m = parse_method(tok)) {
      out.push_back(*m);
    } else {
      throw UsageError("unknown method '" + tok + "' (expected auto, base, berge, flow or td)");
    }
  }
  if (out.empty()) throw UsageError("--method is empty");
  return out;
}

std::vector<PNorm> parse_p_set(const std::string& text) {
  std::vector<PNorm> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) {
    auto p = PNorm::parse(tok);
    if (!p) throw UsageError("bad p value '" + tok + "' in --p-set");
    out.push_back(*p);
  }
  return out;
}

QueryBatch load_batch(const RunConfig& cfg) {
  if (cfg.queries.empty()) throw UsageError("--queries is required");
  auto batch = parse_query_batch(read_file(cfg.queries));
  if (!batch.errors.empty()) {
    std::string msg = "query file " + cfg.queries + " has parse errors:";
    for (const auto& e : batch.errors) msg += "\n  line " + std::to_string(e.line) + ": " + e.message;
    throw UsageError(msg);
  }
  return batch;
}

Catalog require_catalog(const RunConfig& cfg) {
  if (cfg.catalog.empty()) throw UsageError("--catalog is required");
  return load_catalog(cfg.catalog);
}

struct Estimate {
  std::optional<BoundResult> result;
  std::string error;
  double millis = 0;
};

Estimate run_estimate(const ConjunctiveQuery& q, const Catalog& c, std::optional<Method> method) {
  Estimate e;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (method == Method::base) {
      const auto n = consolidate_variables(q).shape.variables.size();
      if (n > kCliBaseLimit)
        throw BoundError(fmt::format("LP_base refused: {} consolidated variables exceeds the limit of {}; "
                                     "use --method flow",
                                     n, kCliBaseLimit));
    }
    EstimateOptions options;
    options.method = method;
    e.result = estimate(q, c, options);
  } catch (const std::exception& ex) {
    e.error = ex.what();
  }
  e.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return e;
}

// Runs jobs[i] for every i on up to `threads` workers; results keep their index.
template <typename Job>
void fan_out(std::size_t n, int threads, Job&& job) {
  const int workers = std::clamp<int>(threads, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) job(i);
  };
  if (workers == 1) {
    loop();
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
}

std::string diagnostics(const Estimate& e) {
  if (!e.error.empty()) return "error: " + e.error;
  std::vector<std::string> parts;
  if (!e.result->uncovered.empty()) {
    std::string u = "uncovered:";
    for (const auto& v : e.result->uncovered) u += " " + v;
    parts.push_back(u);
  }
  if (e.result->empty_statistic) parts.push_back("empty statistic " + *e.result->empty_statistic);
  for (const auto& w : e.result->warnings) parts.push_back(w);
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "; " : "") + parts[i];
  return out;
}

int cmd_build_stats(const RunConfig& cfg) {
  SchemaManifest manifest;
  const auto relations = load_data(cfg.data, &manifest);
  auto stats_cfg = config_from_manifest(manifest);
  if (!cfg.p_set.empty()) stats_cfg.p_set = parse_p_set(cfg.p_set);
  if (cfg.mcv >= 0) stats_cfg.mcv_count = cfg.mcv;
  if (cfg.buckets >= 0) stats_cfg.histogram_bottom_buckets = cfg.buckets;
  stats_cfg.threads = cfg.threads;
  try {
    stats_cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto catalog = build_statistics(relations, stats_cfg);

  const std::string out = cfg.out.empty() ? "catalog.lpb" : cfg.out;
  save_catalog(catalog, out);
  const auto bytes = serialized_bytes_by_relation(catalog);
  std::cout << "relation,rows,entries,bytes\n";
  for (const auto& [name, info] : catalog.relations) {
    const auto b = bytes.find(name);
    std::cout << csv_field(name) << "," << info.row_count << "," << catalog.entry_count(name) << ","
              << (b == bytes.end() ? 0 : b->second) << "\n";
  }
  std::cerr << "wrote " << catalog.stats.size() << " statistics to " << out << " (" << fs::file_size(out)
            << " bytes)\n";
  return 0;
}

int cmd_estimate(const RunConfig& cfg) {
  const auto catalog = require_catalog(cfg);
  const auto batch = load_batch(cfg);
  const auto methods = parse_methods(cfg.method);
  if (methods.size() != 1) throw UsageError("estimate takes a single --method");

  std::vector<Estimate> results(batch.queries.size());
  fan_out(results.size(), cfg.threads,
          [&](std::size_t i) { results[i] = run_estimate(batch.queries[i], catalog, methods[0]); });

  Output out(cfg.out);
  auto& os = out.stream();
  os << "# lpbound estimate csv v" << kCsvVersion << "\n";
  os << "query,bound,log2_bound,method,millis,diagnostics\n";
  bool failed = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& e = results[i];
    os << csv_field(batch.queries[i].name) << ",";
    if (e.result) {
      os << number(e.result->bound) << "," << number(e.result->log2_bound) << "," << to_string(e.result->method);
    } else {
      failed = true;
      os << ",," << (methods[0] ? std::string(to_string(*methods[0])) : "auto");
    }
    os << "," << fmt::format("{:.3f}", e.millis) << "," << csv_field(diagnostics(e)) << "\n";
  }
  return failed ? 1 : 0;
}

int cmd_explain(const RunConfig& cfg) {
  const auto catalog = require_catalog(cfg);
  if (cfg.query.empty()) throw UsageError("explain needs a query");
  const auto q = parse_query(cfg.query);
  const auto methods = parse_methods(cfg.method);
  if (methods.size() != 1) throw UsageError("explain takes a single --method");
  const auto e = run_estimate(q, catalog, methods[0]);
  if (!e.result) throw BoundError(e.error);
  const auto& r = *e.result;

  Output out(cfg.out);
  auto& os = out.stream();
  if (cfg.json) {
    os << r.to_json() << "\n";
    return 0;
  }
  os << q.name << ": " << r.render() << "\n";
  os << "method " << to_string(r.method) << " (" << r.semantics << "), log2 bound " << number(r.log2_bound)
     << ", LP " << r.lp_rows << " x " << r.lp_columns << "\n";
  if (!r.q_inequality.empty()) {
    os << "terms:\n";
    for (const auto& t : r.q_inequality) {
      os << fmt::format("  {:<40} norm {:<14.6g} weight {:.6g}", t.display(), t.norm, t.weight);
      if (!t.provenance.empty()) os << "  [" << t.provenance << "]";
      os << "\n";
    }
  }
  if (r.shannon_certificate && !r.shannon_certificate->empty()) {
    os << "shannon certificate:\n";
    for (const auto& row : *r.shannon_certificate) os << fmt::format("  {:.6g} x  {}\n", row.weight, row.inequality);
  }
  if (!r.method_rows.empty()) {
    os << "method rows:\n";
    for (const auto& row : r.method_rows) os << fmt::format("  {:.6g} x  {}\n", row.weight, row.inequality);
  }
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return 0;
}

int cmd_bench(const RunConfig& cfg) {
  const auto catalog = require_catalog(cfg);
  const auto batch = load_batch(cfg);
  const auto methods = parse_methods(cfg.method);

  std::optional<TinyDatabase> db;
  if (!cfg.data.empty()) {
    try {
      db.emplace(load_data(cfg.data));
    } catch (const OracleError& e) {
      std::cerr << "oracle disabled: " << e.what() << "\n";
    }
  }

  struct Job {
    std::size_t query;
    std::size_t method;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < batch.queries.size(); ++i)
    for (std::size_t m = 0; m < methods.size(); ++m) jobs.push_back({i, m});
  // Timing order is shuffled so that warm-up effects do not favour the first queries.
  std::vector<std::size_t> order(jobs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Estimate> results(jobs.size());
  fan_out(jobs.size(), cfg.threads, [&](std::size_t k) {
    const auto& job = jobs[order[k]];
    results[order[k]] = run_estimate(batch.queries[job.query], catalog, methods[job.method]);
  });

  std::vector<std::optional<std::uint64_t>> truth(batch.queries.size());
  if (db) {
    for (std::size_t i = 0; i < batch.queries.size(); ++i) {
      try {
        truth[i] = true_cardinality(batch.queries[i], *db);
      } catch (const std::exception& e) {
        std::cerr << batch.queries[i].name << ": no oracle truth: " << e.what() << "\n";
      }
    }
  }

  Output out(cfg.out);
  auto& os = out.stream();
  os << "# lpbound bench csv v" << kCsvVersion << " seed " << cfg.seed << "\n";
  os << "query,method,bound,log2_bound,true_card,error_ratio,est_millis,diagnostics\n";
  bool failed = false;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& e = results[k];
    const auto& q = batch.queries[jobs[k].query];
    const auto m = methods[jobs[k].method];
    os << csv_field(q.name) << ",";
    if (!e.result) {
      failed = true;
      os << (m ? std::string(to_string(*m)) : "auto") << ",,,,";
    } else {
      const auto& r = *e.result;
      os << to_string(r.method) << "," << number(r.bound) << "," << number(r.log2_bound) << ",";
      if (const auto t = truth[jobs[k].query]) {
        double ratio = 1.0;
        if (*t > 0) {
          ratio = r.bound / static_cast<double>(*t);
        } else if (r.bound > 0) {
          ratio = std::numeric_limits<double>::infinity();
        }
        os << *t << "," << number(ratio);
      } else {
        os << ",";
      }
    }
    os << "," << fmt::format("{:.3f}", e.millis) << "," << csv_field(diagnostics(e)) << "\n";
  }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cardinality upper bounds from degree-sequence norms"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* build = app.add_subcommand("build-stats", "Build a statistics catalog from CSV data");
  build->add_option("--data", cfg.data, "Directory holding schema.json, or the manifest itself")->required();
  build->add_option("--out", cfg.out, "Catalog file to write (default catalog.lpb)");
  build->add_option("--p-set", cfg.p_set, "Comma-separated norms, e.g. 1,2,inf");
  build->add_option("--mcv", cfg.mcv, "Most common values kept per predicate column");
  build->add_option("--buckets", cfg.buckets, "Bottom-layer histogram buckets (power of two)");
  build->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* est = app.add_subcommand("estimate", "Bound every query of a batch file");
  est->add_option("--catalog", cfg.catalog, "Catalog file")->required();
  est->add_option("--queries", cfg.queries, "Query batch file")->required();
  est->add_option("--method", cfg.method, "auto, base, berge, flow or td");
  est->add_option("--threads", cfg.threads, "Queries estimated in parallel")->check(CLI::PositiveNumber);
  est->add_option("--out", cfg.out, "CSV output file (default stdout)");

  auto* explain = app.add_subcommand("explain", "Show the q-inequality behind one bound");
  explain->add_option("query", cfg.query, "Query text")->required();
  explain->add_option("--catalog", cfg.catalog, "Catalog file")->required();
  explain->add_option("--method", cfg.method, "auto, base, berge, flow or td");
  explain->add_flag("--json", cfg.json, "Structured output");
  explain->add_option("--out", cfg.out, "Output file (default stdout)");

  auto* bench = app.add_subcommand("bench", "Estimate a batch and compare with true cardinalities");
  bench->add_option("--catalog", cfg.catalog, "Catalog file")->required();
  bench->add_option("--queries", cfg.queries, "Query batch file")->required();
  bench->add_option("--data", cfg.data, "Tiny database for oracle truth");
  bench->add_option("--method", cfg.method, "Comma-separated methods; one row per query and method");
  bench->add_option("--seed", cfg.seed, "Seed for the timing order");
  bench->add_option("--threads", cfg.threads, "Queries estimated in parallel")->check(CLI::PositiveNumber);
  bench->add_option("--out", cfg.out, "CSV output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build) return cmd_build_stats(cfg);
    if (*est) return cmd_estimate(cfg);
    if (*explain) return cmd_explain(cfg);
    if (*bench) return cmd_bench(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IngestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
