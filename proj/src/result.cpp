#include "lpbound/result.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>

namespace lpbound {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::base: return "base";
    case Method::berge: return "berge";
    case Method::flow: return "flow";
    case Method::td: return "td";
  }
  return "base";
}

std::optional<Method> parse_method(std::string_view text) {
  if (text == "base") return Method::base;
  if (text == "berge") return Method::berge;
  if (text == "flow") return Method::flow;
  if (text == "td") return Method::td;
  return std::nullopt;
}

namespace {

std::string sig6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

std::string QTerm::display() const {
  std::string name = key.display();
  if (!atom.empty() && atom != key.relation) name.replace(4, key.relation.size(), atom);
  if (full && !key.u && key.variant.kind == VariantKind::whole && p == PNorm(1.0))
    return "|" + (atom.empty() ? key.relation : atom) + "|";
  return "‖" + name + "‖_" + (p.is_infinite() ? std::string("∞") : p.to_string());
}

bool BoundResult::is_infinite() const { return std::isinf(bound); }

std::string BoundResult::render() const {
  if (empty_statistic) return "bound 0: empty statistic " + *empty_statistic;
  if (is_infinite()) {
    std::string out = "|Q| unbounded";
    if (!uncovered.empty()) {
      out += ": uncovered variables";
      for (const auto& v : uncovered) out += " " + v;
    }
    return out;
  }
  std::string out = "|Q| <= ";
  bool first = true;
  for (const auto& t : q_inequality) {
    if (!first) out += " * ";
    first = false;
    out += t.display() + "^" + sig6(t.weight);
  }
  if (first) out += "1";
  out += " = " + sig6(bound);
  return out;
}

std::string BoundResult::to_json() const {
  nlohmann::ordered_json j;
  j["bound"] = is_infinite() ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(bound);
  j["log2_bound"] = is_infinite() ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(log2_bound);
  j["method"] = std::string(to_string(method));
  j["semantics"] = semantics;
  auto terms = nlohmann::ordered_json::array();
  for (const auto& t : q_inequality) {
    nlohmann::ordered_json e;
    e["statistic"] = t.display();
    e["relation"] = t.key.relation;
    e["atom"] = t.atom;
    e["u"] = t.key.u ? nlohmann::ordered_json(*t.key.u) : nlohmann::ordered_json(nullptr);
    e["v"] = t.key.v;
    e["variant"] = t.key.variant.encode();
    e["p"] = t.p.to_string();
    e["norm"] = t.norm;
    e["weight"] = t.weight;
    if (!t.provenance.empty()) e["provenance"] = t.provenance;
    terms.push_back(e);
  }
  j["q_inequality"] = terms;
  if (shannon_certificate) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : *shannon_certificate) rows.push_back({{"inequality", r.inequality}, {"weight", r.weight}});
    j["shannon_certificate"] = rows;
  }
  if (!method_rows.empty()) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : method_rows) rows.push_back({{"row", r.inequality}, {"weight", r.weight}});
    j["method_rows"] = rows;
  }
  if (!uncovered.empty()) j["uncovered"] = uncovered;
  if (!warnings.empty()) j["warnings"] = warnings;
  if (empty_statistic) j["empty_statistic"] = *empty_statistic;
  j["lp_rows"] = lp_rows;
  j["lp_columns"] = lp_columns;
  return j.dump(2);
}

}  // namespace lpbound
