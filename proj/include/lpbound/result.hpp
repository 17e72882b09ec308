#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lpbound/catalog.hpp"

namespace lpbound {

enum class Method { base, berge, flow, td };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view text);

/// One factor ‖deg‖_p^weight of a q-inequality.
struct QTerm {
  StatKey key;
  std::string atom;
  PNorm p;
  double norm = 0;
  double weight = 0;
  /// True for u = ∅ over all columns, which renders as |R| at p = 1.
  bool full = false;
  /// How the norm was obtained when it is not a single catalog entry (min/sum/prefix chains).
  std::string provenance;

  std::string display() const;
};

struct CertificateRow {
  std::string inequality;
  double weight = 0;
};

struct BoundResult {
  double bound = 0;
  double log2_bound = 0;
  Method method = Method::base;
  std::vector<QTerm> q_inequality;
  std::optional<std::vector<CertificateRow>> shannon_certificate;
  std::vector<CertificateRow> method_rows;
  std::vector<std::string> uncovered;
  std::vector<std::string> warnings;
  /// Which semantics produced the bound (full, group-by objective, rewritten, flows on V0).
  std::string semantics;
  /// Set when a zero statistic forced the bound to 0.
  std::optional<std::string> empty_statistic;
  int lp_rows = 0;
  int lp_columns = 0;

  bool is_infinite() const;
  /// "|Q| <= ‖deg_R(Y|X)‖_2^0.5 * ..." with 6 significant digits.
  std::string render() const;
  std::string to_json() const;
};

}  // namespace lpbound
