#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lpbound/query.hpp"

namespace lpbound {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        message_(message), line_(line), column_(column) {}
  const std::string& message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int line_;
  int column_;
};

/// Parses `Name(X,Y) :- R(X,Z), S(Z,Y); R.A = 5 AND R.B BETWEEN 1 AND 9; S.C = 2.`
/// A head of `*` makes the query full. Group-by variables are stored in body order.
ConjunctiveQuery parse_query(std::string_view text);

/// Canonical text; parse_query(print_query(q)) reproduces q for any parsed q.
std::string print_query(const ConjunctiveQuery& q);
std::string print_predicate(const PredicateExpr& e, const std::string& label);

struct BatchError {
  int line = 0;
  std::string message;
};

struct QueryBatch {
  std::vector<ConjunctiveQuery> queries;
  std::vector<int> lines;
  std::vector<BatchError> errors;
};

/// One query per line; blank lines and lines starting with '#' are skipped.
QueryBatch parse_query_batch(std::string_view text);

}  // namespace lpbound
