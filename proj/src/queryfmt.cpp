#include "lpbound/queryfmt.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

namespace lpbound {

namespace {

enum class Tok { ident, number, string, lparen, rparen, comma, semicolon, dot, star, hash, turnstile, equals, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  Value value;
  int line = 1;
  int column = 1;
};

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::ident;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          t.text += advance();
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 ((c == '-' || c == '+') && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number(t);
      } else if (c == '\'' || c == '"') {
        lex_string(t);
      } else if (c == ':' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        t.kind = Tok::turnstile;
        t.text = ":-";
        advance();
        advance();
      } else {
        switch (c) {
          case '(': t.kind = Tok::lparen; break;
          case ')': t.kind = Tok::rparen; break;
          case ',': t.kind = Tok::comma; break;
          case ';': t.kind = Tok::semicolon; break;
          case '.': t.kind = Tok::dot; break;
          case '*': t.kind = Tok::star; break;
          case '#': t.kind = Tok::hash; break;
          case '=': t.kind = Tok::equals; break;
          default:
            throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        }
        t.text = std::string(1, advance());
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  void lex_number(Token& t) {
    t.kind = Tok::number;
    if (src_[pos_] == '-' || src_[pos_] == '+') t.text += advance();
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
    bool real = false;
    // A dot counts as a decimal point only when a digit follows; otherwise it ends the query.
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      real = true;
      t.text += advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '-' || src_[look] == '+')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        real = true;
        while (pos_ < look) t.text += advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
      }
    }
    const char* first = t.text.data() + (t.text[0] == '+' ? 1 : 0);
    const char* last = t.text.data() + t.text.size();
    if (real) {
      double d = 0;
      auto [ptr, ec] = std::from_chars(first, last, d);
      if (ec != std::errc{} || ptr != last) throw ParseError("bad number " + t.text, t.line, t.column);
      t.value = d;
    } else {
      std::int64_t i = 0;
      auto [ptr, ec] = std::from_chars(first, last, i);
      if (ec != std::errc{} || ptr != last) throw ParseError("bad number " + t.text, t.line, t.column);
      t.value = i;
    }
  }

  void lex_string(Token& t) {
    t.kind = Tok::string;
    const char quote = advance();
    std::string s;
    while (true) {
      if (pos_ >= src_.size()) throw ParseError("unterminated string literal", t.line, t.column);
      const char c = advance();
      if (c == quote) {
        if (pos_ < src_.size() && src_[pos_] == quote) {
          s += advance();
          continue;
        }
        break;
      }
      s += c;
    }
    t.text = s;
    t.value = s;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_variable_name(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ConjunctiveQuery run() {
    ConjunctiveQuery q;
    q.name = expect(Tok::ident, "query name").text;
    expect(Tok::lparen, "'('");
    bool star = false;
    std::vector<std::string> head;
    if (peek().kind == Tok::star) {
      next();
      star = true;
    } else {
      head = varlist();
    }
    expect(Tok::rparen, "')'");
    expect(Tok::turnstile, "':-'");
    q.atoms.push_back(atom());
    while (peek().kind == Tok::comma) {
      next();
      q.atoms.push_back(atom());
    }
    while (peek().kind == Tok::semicolon) {
      next();
      clause(q);
    }
    expect(Tok::dot, "'.'");
    if (peek().kind != Tok::end) fail("unexpected input after '.'", peek());

    auto vars = q.variables();
    if (star) {
      q.groupby = vars;
    } else {
      for (const auto& v : vars)
        if (std::find(head.begin(), head.end(), v) != head.end()) q.groupby.push_back(v);
      for (const auto& h : head)
        if (std::find(vars.begin(), vars.end(), h) == vars.end()) q.groupby.push_back(h);
    }
    return q;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& message, const Token& at) const {
    throw ParseError(message, at.line, at.column);
  }

  const Token& expect(Tok kind, const char* what) {
    const auto& t = peek();
    if (t.kind != kind) fail(std::string("expected ") + what + (t.kind == Tok::end ? " before end of input" : " near '" + t.text + "'"), t);
    check_reserved(t);
    return next();
  }

  void check_reserved(const Token& t) const {
    if (t.kind != Tok::ident) return;
    const auto u = upper(t.text);
    if (u == "IN" || u == "LIKE" || u == "NOT") fail(u + " predicates are not supported", t);
  }

  bool keyword(const char* word) const {
    return peek().kind == Tok::ident && upper(peek().text) == word;
  }

  std::vector<std::string> varlist() {
    std::vector<std::string> out;
    while (true) {
      const auto& t = expect(Tok::ident, "variable");
      if (!is_variable_name(t.text)) fail("variable '" + t.text + "' must start with an uppercase letter", t);
      out.push_back(t.text);
      if (peek().kind != Tok::comma) return out;
      next();
    }
  }

  Atom atom() {
    Atom a;
    const auto& rel = expect(Tok::ident, "relation name");
    a.relation = rel.text;
    if (peek().kind == Tok::hash) {
      next();
      const auto& k = expect(Tok::number, "alias number");
      a.alias = a.relation + "#" + k.text;
    }
    const auto label = a.label();
    if (std::find(labels_.begin(), labels_.end(), label) != labels_.end() && !a.alias.empty())
      fail("duplicate alias " + label, rel);
    labels_.push_back(label);
    expect(Tok::lparen, "'('");
    a.vars = varlist();
    expect(Tok::rparen, "')'");
    return a;
  }

  // Resolves a relation reference in a predicate to an atom index.
  std::size_t resolve(const ConjunctiveQuery& q, const std::string& relation, const std::string& alias,
                      const Token& at) {
    std::vector<std::size_t> matches;
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
      const auto& a = q.atoms[i];
      if (!alias.empty() ? a.alias == alias : a.relation == relation) matches.push_back(i);
    }
    if (matches.empty()) fail("unknown relation alias " + (alias.empty() ? relation : alias), at);
    if (matches.size() > 1) fail("predicate on " + relation + " is ambiguous; use an alias such as " + relation + "#2", at);
    return matches.front();
  }

  void clause(ConjunctiveQuery& q) {
    std::optional<std::size_t> atom_index;
    auto e = disjunction(q, atom_index);
    auto& slot = q.atoms[*atom_index].predicate;
    if (!slot) {
      slot = std::move(e);
    } else {
      std::vector<PredicateExpr> kids;
      auto absorb = [&](PredicateExpr x) {
        if (x.kind == PredicateExpr::Kind::conj)
          for (auto& c : x.children) kids.push_back(std::move(c));
        else
          kids.push_back(std::move(x));
      };
      absorb(std::move(*slot));
      absorb(std::move(e));
      slot = PredicateExpr::all_of(std::move(kids));
    }
  }

  PredicateExpr disjunction(ConjunctiveQuery& q, std::optional<std::size_t>& atom_index) {
    std::vector<PredicateExpr> parts;
    parts.push_back(conjunction(q, atom_index));
    while (keyword("OR")) {
      next();
      parts.push_back(conjunction(q, atom_index));
    }
    return combine(std::move(parts), PredicateExpr::Kind::disj);
  }

  PredicateExpr conjunction(ConjunctiveQuery& q, std::optional<std::size_t>& atom_index) {
    std::vector<PredicateExpr> parts;
    parts.push_back(primary(q, atom_index));
    while (keyword("AND")) {
      next();
      parts.push_back(primary(q, atom_index));
    }
    return combine(std::move(parts), PredicateExpr::Kind::conj);
  }

  static PredicateExpr combine(std::vector<PredicateExpr> parts, PredicateExpr::Kind kind) {
    if (parts.size() == 1) return std::move(parts.front());
    std::vector<PredicateExpr> flat;
    for (auto& p : parts) {
      if (p.kind == kind)
        for (auto& c : p.children) flat.push_back(std::move(c));
      else
        flat.push_back(std::move(p));
    }
    PredicateExpr e;
    e.kind = kind;
    e.children = std::move(flat);
    return e;
  }

  PredicateExpr primary(ConjunctiveQuery& q, std::optional<std::size_t>& atom_index) {
    if (peek().kind == Tok::lparen) {
      next();
      auto e = disjunction(q, atom_index);
      expect(Tok::rparen, "')'");
      return e;
    }
    const auto& rel = expect(Tok::ident, "relation name in predicate");
    std::string relation = rel.text;
    std::string alias;
    if (peek().kind == Tok::hash) {
      next();
      alias = relation + "#" + expect(Tok::number, "alias number").text;
    }
    const auto idx = resolve(q, relation, alias, rel);
    if (atom_index && *atom_index != idx)
      fail("a predicate clause must refer to a single atom; split it with ';'", rel);
    atom_index = idx;
    expect(Tok::dot, "'.'");
    const auto& col = expect(Tok::ident, "column name");
    if (peek().kind == Tok::equals) {
      next();
      return PredicateExpr::eq(col.text, literal());
    }
    if (keyword("BETWEEN")) {
      next();
      auto lo = literal();
      if (!keyword("AND")) fail("expected AND in BETWEEN", peek());
      next();
      auto hi = literal();
      return PredicateExpr::range(col.text, std::move(lo), std::move(hi));
    }
    check_reserved(peek());
    fail("expected '=' or BETWEEN after " + col.text, peek());
  }

  Value literal() {
    const auto& t = peek();
    if (t.kind == Tok::number || t.kind == Tok::string) {
      next();
      return t.value;
    }
    check_reserved(t);
    fail("expected a literal", t);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> labels_;
};

std::string print_literal(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) {
    std::string out = "'";
    for (char c : *s) {
      if (c == '\'') out += '\'';
      out += c;
    }
    return out + "'";
  }
  if (std::holds_alternative<double>(v)) {
    auto text = canonical_text(v);
    if (text.find_first_of(".eE") == std::string::npos) text += ".0";
    return text;
  }
  return canonical_text(v);
}

std::string print_expr(const PredicateExpr& e, const std::string& label, bool nested) {
  switch (e.kind) {
    case PredicateExpr::Kind::eq: return label + "." + e.column + " = " + print_literal(e.literal);
    case PredicateExpr::Kind::range:
      return label + "." + e.column + " BETWEEN " + print_literal(e.lo) + " AND " + print_literal(e.hi);
    case PredicateExpr::Kind::conj:
    case PredicateExpr::Kind::disj: {
      const char* op = e.kind == PredicateExpr::Kind::conj ? " AND " : " OR ";
      std::string out;
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += op;
        out += print_expr(e.children[i], label, true);
      }
      return nested ? "(" + out + ")" : out;
    }
  }
  return {};
}

}  // namespace

ConjunctiveQuery parse_query(std::string_view text) {
  Lexer lex(text);
  Parser p(lex.run());
  return p.run();
}

std::string print_predicate(const PredicateExpr& e, const std::string& label) {
  return print_expr(e, label, false);
}

std::string print_query(const ConjunctiveQuery& q) {
  std::string out = q.name + "(";
  if (q.is_full()) {
    out += "*";
  } else {
    for (std::size_t i = 0; i < q.groupby.size(); ++i) out += (i ? "," : "") + q.groupby[i];
  }
  out += ") :- ";
  for (std::size_t i = 0; i < q.atoms.size(); ++i) {
    const auto& a = q.atoms[i];
    if (i) out += ", ";
    out += a.label() + "(";
    for (std::size_t k = 0; k < a.vars.size(); ++k) out += (k ? "," : "") + a.vars[k];
    out += ")";
  }
  for (const auto& a : q.atoms)
    if (a.predicate) out += "; " + print_predicate(*a.predicate, a.label());
  return out + ".";
}

QueryBatch parse_query_batch(std::string_view text) {
  QueryBatch batch;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#') {
      try {
        batch.queries.push_back(parse_query(line));
        batch.lines.push_back(line_no);
      } catch (const ParseError& e) {
        batch.errors.push_back({line_no, "column " + std::to_string(e.column()) + ": " + e.message()});
      }
    }
    if (end == text.size()) break;
  }
  return batch;
}

}  // namespace lpbound
