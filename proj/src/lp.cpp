#include "lpbound/lp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

namespace lpbound {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::infeasible: return "infeasible";
  }
  return "infeasible";
}

int LinearProgram::add_variable(std::string name, double lower) {
  vars_.push_back({std::move(name), lower});
  obj_.push_back(0.0);
  return static_cast<int>(vars_.size()) - 1;
}

int LinearProgram::add_constraint(std::string name, std::vector<LpTerm> terms, RowType type, double rhs) {
  rows_.push_back({std::move(name), std::move(terms), type, rhs});
  return static_cast<int>(rows_.size()) - 1;
}

void LinearProgram::set_objective(std::vector<LpTerm> terms) {
  std::fill(obj_.begin(), obj_.end(), 0.0);
  for (const auto& t : terms) add_objective(t.var, t.coef);
}

void LinearProgram::add_objective(int var, double coef) {
  if (var < 0 || var >= num_variables()) throw std::invalid_argument("objective references unknown variable");
  obj_[var] += coef;
}

void LinearProgram::validate() const {
  for (const auto& v : vars_)
    if (!(v.lower >= 0) || !std::isfinite(v.lower))
      throw std::invalid_argument("variable " + v.name + " needs a finite lower bound >= 0");
  for (double c : obj_)
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite objective coefficient");
  for (const auto& r : rows_) {
    if (!std::isfinite(r.rhs)) throw std::invalid_argument("row " + r.name + " has a non-finite rhs");
    for (const auto& t : r.terms) {
      if (t.var < 0 || t.var >= num_variables())
        throw std::invalid_argument("row " + r.name + " references an undeclared variable");
      if (!std::isfinite(t.coef)) throw std::invalid_argument("row " + r.name + " has a non-finite coefficient");
    }
  }
}

double LinearProgram::evaluate(const std::vector<double>& x) const {
  double s = 0;
  for (std::size_t j = 0; j < obj_.size(); ++j) s += obj_[j] * x[j];
  return s;
}

namespace {

std::string lp_name(const std::string& raw, char prefix, int index, std::set<std::string>& used) {
  std::string s;
  for (char c : raw) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') s += c;
    else if (!s.empty() && s.back() != '_') s += '_';
  }
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.' || s[0] == 'e' || s[0] == 'E')
    s = std::string(1, prefix) + "_" + s;
  if (s.size() > 200) s.resize(200);
  if (!used.insert(s).second) {
    s += "_" + std::to_string(index);
    used.insert(s);
  }
  return s;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void append_terms(std::string& out, const std::vector<std::pair<std::string, double>>& terms) {
  if (terms.empty()) {
    out += " 0";
    return;
  }
  for (const auto& [name, c] : terms) {
    out += c < 0 ? " - " : " + ";
    out += num(std::abs(c)) + " " + name;
  }
}

}  // namespace

std::string LinearProgram::to_lp_format() const {
  std::set<std::string> used;
  std::vector<std::string> vn;
  for (int j = 0; j < num_variables(); ++j) vn.push_back(lp_name(vars_[j].name, 'x', j, used));
  std::string out = "\\ generated by lpbound\n";
  out += sense_ == Sense::maximize ? "Maximize\n" : "Minimize\n";
  out += " obj:";
  std::vector<std::pair<std::string, double>> terms;
  for (int j = 0; j < num_variables(); ++j)
    if (obj_[j] != 0) terms.emplace_back(vn[j], obj_[j]);
  append_terms(out, terms);
  out += "\nSubject To\n";
  for (int i = 0; i < num_constraints(); ++i) {
    const auto& r = rows_[i];
    terms.clear();
    for (const auto& t : r.terms) terms.emplace_back(vn[t.var], t.coef);
    out += " " + lp_name(r.name, 'c', i, used) + ":";
    append_terms(out, terms);
    out += r.type == RowType::le ? " <= " : (r.type == RowType::ge ? " >= " : " = ");
    out += num(r.rhs) + "\n";
  }
  out += "Bounds\n";
  for (int j = 0; j < num_variables(); ++j) out += " " + vn[j] + " >= " + num(vars_[j].lower) + "\n";
  out += "End\n";
  return out;
}

std::string check_certificate(const LinearProgram& lp, LpSolution& sol) {
  if (sol.status != LpStatus::optimal) return {};
  const int n = lp.num_variables();
  const int m = lp.num_constraints();
  const bool maximize = lp.sense() == Sense::maximize;
  const auto& x = sol.primal;
  const auto& y = sol.dual;
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != m) return "solution has the wrong shape";

  double primal_obj = lp.evaluate(x);
  double scale = 1.0 + std::abs(primal_obj);
  double feas = 0;
  double comp = 0;
  double dual_obj = 0;
  double dual_infeas = 0;
  std::vector<double> reduced(lp.objective());
  for (int j = 0; j < n; ++j) {
    const double l = lp.variables()[j].lower;
    feas = std::max(feas, (l - x[j]) / std::max(1.0, std::abs(l)));
  }
  for (int i = 0; i < m; ++i) {
    const auto& r = lp.constraints()[i];
    double ax = 0;
    double mag = std::abs(r.rhs);
    for (const auto& t : r.terms) {
      ax += t.coef * x[t.var];
      mag = std::max(mag, std::abs(t.coef * x[t.var]));
      reduced[t.var] -= y[i] * t.coef;
    }
    const double slack = ax - r.rhs;
    double viol = 0;
    if (r.type == RowType::le) viol = std::max(0.0, slack);
    if (r.type == RowType::ge) viol = std::max(0.0, -slack);
    if (r.type == RowType::eq) viol = std::abs(slack);
    feas = std::max(feas, viol / std::max(1.0, mag));
    // Sign of the multiplier: maximize/≤ and minimize/≥ rows are non-negative.
    double wrong = 0;
    if (r.type == RowType::le) wrong = maximize ? -y[i] : y[i];
    if (r.type == RowType::ge) wrong = maximize ? y[i] : -y[i];
    dual_infeas = std::max(dual_infeas, wrong);
    comp = std::max(comp, std::abs(y[i] * slack) / scale);
    dual_obj += y[i] * r.rhs;
  }
  for (int j = 0; j < n; ++j) {
    const double l = lp.variables()[j].lower;
    const double wrong = maximize ? reduced[j] : -reduced[j];
    dual_infeas = std::max(dual_infeas, wrong / scale);
    comp = std::max(comp, std::abs(reduced[j] * (x[j] - l)) / scale);
    dual_obj += reduced[j] * l;
  }
  sol.primal_residual = feas;
  sol.complementarity = comp;
  sol.duality_gap = std::abs(primal_obj - dual_obj) / scale;
  char buf[200];
  if (feas > 1e-9) {
    std::snprintf(buf, sizeof buf, "primal residual %.3g exceeds 1e-9", feas);
    return buf;
  }
  if (dual_infeas > 1e-7) {
    std::snprintf(buf, sizeof buf, "dual infeasibility %.3g exceeds 1e-7", dual_infeas);
    return buf;
  }
  if (comp > 1e-6) {
    std::snprintf(buf, sizeof buf, "complementary slackness residual %.3g exceeds 1e-6", comp);
    return buf;
  }
  if (sol.duality_gap > 1e-6) {
    std::snprintf(buf, sizeof buf, "duality gap %.3g exceeds 1e-6", sol.duality_gap);
    return buf;
  }
  return {};
}

}  // namespace lpbound
