#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "lpbound/lp.hpp"

namespace lpbound {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using RowMat = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

// LU factors of the basis at the last refactorization plus product-form updates since then.
class BasisFactor {
 public:
  void factor(const SpMat& a, const std::vector<int>& basis) {
    const int m = static_cast<int>(basis.size());
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < m; ++k)
      for (SpMat::InnerIterator it(a, basis[k]); it; ++it) trips.emplace_back(static_cast<int>(it.row()), k, it.value());
    SpMat b(m, m);
    b.setFromTriplets(trips.begin(), trips.end());
    b.makeCompressed();
    lu_.analyzePattern(b);
    lu_.factorize(b);
    if (lu_.info() != Eigen::Success) throw NumericalError("simplex basis became singular");
    etas_.clear();
  }

  void ftran(VectorXd& v) const {
    v = lu_.solve(v).eval();
    for (const auto& e : etas_) {
      const double xr = v[e.row] / e.pivot;
      if (xr != 0.0)
        for (std::size_t k = 0; k < e.idx.size(); ++k) v[e.idx[k]] -= e.val[k] * xr;
      v[e.row] = xr;
    }
  }

  void btran(VectorXd& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->row];
      for (std::size_t k = 0; k < it->idx.size(); ++k) s -= it->val[k] * v[it->idx[k]];
      v[it->row] = s / it->pivot;
    }
    v = lu_.transpose().solve(v).eval();
  }

  void push(int row, const VectorXd& alpha) {
    Eta e;
    e.row = row;
    e.pivot = alpha[row];
    for (int i = 0; i < alpha.size(); ++i)
      if (i != row && alpha[i] != 0.0) {
        e.idx.push_back(i);
        e.val.push_back(alpha[i]);
      }
    etas_.push_back(std::move(e));
  }

  int updates() const { return static_cast<int>(etas_.size()); }

 private:
  struct Eta {
    int row = 0;
    double pivot = 1;
    std::vector<int> idx;
    std::vector<double> val;
  };
  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
};

// Bounded revised simplex on min c^T x, A x = b, 0 <= x <= upper, where upper is +inf except
// for retired artificial columns (upper 0).
class Engine {
 public:
  Engine(const SpMat& a, VectorXd b, std::vector<double> upper, std::vector<int> basis, const SimplexOptions& opt)
      : a_(a), rows_(a), b_(std::move(b)), upper_(std::move(upper)), basis_(std::move(basis)), opt_(opt) {
    where_.assign(a_.cols(), -1);
    row_.assign(a_.cols(), 0.0);
    for (int i = 0; i < static_cast<int>(basis_.size()); ++i) where_[basis_[i]] = i;
    refactor();
  }

  enum class Outcome { optimal, unbounded };

  Outcome primal(const VectorXd& cost) {
    const int m = static_cast<int>(basis_.size());
    const int n = static_cast<int>(a_.cols());
    const bool devex = opt_.pricing == Pricing::devex;
    const bool exact = opt_.pricing == Pricing::steepest_edge;
    int degenerate_run = 0;
    VectorXd y(m), alpha(m), rho(m), w(m);
    // Reduced costs are updated from the pivot row and recomputed after every refactorization.
    VectorXd d(n);
    bool stale = true;
    // Devex reference weights restart with every phase. Edge norms depend only on the basis and
    // carry over; they are exact when they start from a unit basis.
    std::vector<double> fresh;
    if (!exact) fresh.assign(static_cast<std::size_t>(n), 1.0);
    if (exact && edge_.empty()) {
      edge_.assign(static_cast<std::size_t>(n), 1.0);
      if (unit_basis())
        for (int j = 0; j < n; ++j)
          if (where_[j] < 0) edge_[j] = 1.0 + a_.col(j).squaredNorm();
    }
    std::vector<double>& weight = exact ? edge_ : fresh;
    while (true) {
      guard();
      if (stale || factor_.updates() == 0) {
        price(cost, y);
        for (int j = 0; j < n; ++j) d[j] = where_[j] >= 0 ? 0.0 : reduced_cost(cost, y, j);
        stale = false;
      }
      const bool bland = degenerate_run >= opt_.bland_after;
      int q = -1;
      int steepest = -1;
      double best = 0;
      double most_negative = -kCostTol;
      for (int j = 0; j < n; ++j) {
        if (where_[j] >= 0 || upper_[j] == 0.0 || d[j] >= -kCostTol) continue;
        if (bland) {
          q = j;
          break;
        }
        if (d[j] < most_negative) {
          most_negative = d[j];
          steepest = j;
        }
        const double score = devex || exact ? d[j] * d[j] / weight[j] : -d[j];
        if (score > best) {
          best = score;
          q = j;
        }
      }
      if (q < 0) q = steepest;
      if (q < 0) {
        // Confirm optimality on fresh factors before stopping.
        if (factor_.updates() == 0) return Outcome::optimal;
        refactor();
        continue;
      }

      load_column(q, alpha);
      factor_.ftran(alpha);
      const int r = ratio_test(alpha, bland);
      if (r < 0) return Outcome::unbounded;
      double step;
      if (alpha[r] > 0)
        step = std::max(0.0, x_[r]) / alpha[r];
      else
        step = (std::min(upper_[basis_[r]], x_[r]) - upper_[basis_[r]]) / alpha[r];
      step = std::max(step, 0.0);
      degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;

      rho.setZero();
      rho[r] = 1.0;
      factor_.btran(rho);
      pivot_row(rho);
      const double aq = alpha[r];
      const double wq = exact ? 1.0 + alpha.squaredNorm() : weight[q];
      if (exact) {
        w = alpha;
        factor_.btran(w);
      }
      const double theta = d[q] / aq;
      const int leaving = basis_[r];
      for (int j : touched_) {
        const double arj = row_[j];
        row_[j] = 0.0;
        if (where_[j] >= 0 || j == q) continue;
        d[j] -= theta * arj;
        const double ratio = arj / aq;
        if (devex) weight[j] = std::max(weight[j], ratio * ratio * wq);
        if (exact) {
          double ajw = 0;
          for (SpMat::InnerIterator it(a_, j); it; ++it) ajw += it.value() * w[it.row()];
          weight[j] = std::max(weight[j] - 2 * ratio * ajw + ratio * ratio * wq, 1 + ratio * ratio);
        }
      }
      d[q] = 0.0;
      d[leaving] = -theta;
      if (exact) weight[leaving] = std::max(wq / (aq * aq), 1.0);
      if (devex) {
        weight[leaving] = std::max(wq / (aq * aq), 1.0);
        // Restart the reference framework once the weights lose their scale.
        if (*std::max_element(weight.begin(), weight.end()) > 1e12) std::fill(weight.begin(), weight.end(), 1.0);
      }
      pivot(r, q, alpha, step);
    }
  }

  // Restores primal feasibility from a dual-feasible basis. Returns false when the problem
  // has no feasible point.
  bool dual(const VectorXd& cost, double tol) {
    const int m = static_cast<int>(basis_.size());
    VectorXd y(m), rho(m), alpha(m);
    while (true) {
      guard();
      int r = -1;
      double worst = tol;
      for (int i = 0; i < m; ++i) {
        const double viol = std::max(-x_[i], x_[i] - upper_[basis_[i]]);
        if (viol > worst) {
          worst = viol;
          r = i;
        }
      }
      if (r < 0) return true;
      const bool below = x_[r] < 0;
      rho.setZero();
      rho[r] = 1.0;
      factor_.btran(rho);
      price(cost, y);
      int q = -1;
      double best_ratio = kInf;
      double best_mag = 0;
      for (int j = 0; j < a_.cols(); ++j) {
        if (where_[j] >= 0 || upper_[j] == 0.0) continue;
        double arj = 0;
        for (SpMat::InnerIterator it(a_, j); it; ++it) arj += it.value() * rho[it.row()];
        if (below ? arj >= -kPivotTol : arj <= kPivotTol) continue;
        const double d = std::max(0.0, reduced_cost(cost, y, j));
        const double ratio = d / std::abs(arj);
        if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && std::abs(arj) > best_mag)) {
          best_ratio = ratio;
          best_mag = std::abs(arj);
          q = j;
        }
      }
      if (q < 0) return false;
      load_column(q, alpha);
      factor_.ftran(alpha);
      if (std::abs(alpha[r]) < kPivotTol) throw NumericalError("dual simplex pivot vanished");
      const double target = below ? 0.0 : upper_[basis_[r]];
      const double step = (x_[r] - target) / alpha[r];
      pivot(r, q, alpha, std::max(step, 0.0));
    }
  }

  void set_rhs(VectorXd b) {
    b_ = std::move(b);
    refactor();
  }

  void set_upper(int j, double u) { upper_[j] = u; }

  // Pivots basic columns with upper bound 0 out of the basis where a replacement exists.
  void retire(const std::vector<bool>& is_artificial) {
    const int m = static_cast<int>(basis_.size());
    VectorXd rho(m), alpha(m);
    for (int r = 0; r < m; ++r) {
      if (!is_artificial[basis_[r]]) continue;
      rho.setZero();
      rho[r] = 1.0;
      factor_.btran(rho);
      int q = -1;
      double best = 1e-7;
      for (int j = 0; j < a_.cols(); ++j) {
        if (where_[j] >= 0 || is_artificial[j]) continue;
        double arj = 0;
        for (SpMat::InnerIterator it(a_, j); it; ++it) arj += it.value() * rho[it.row()];
        if (std::abs(arj) > best) {
          best = std::abs(arj);
          q = j;
        }
      }
      if (q < 0) continue;
      load_column(q, alpha);
      factor_.ftran(alpha);
      const double step = x_[r] / alpha[r];
      pivot(r, q, alpha, step);
    }
  }

  const std::vector<int>& basis() const { return basis_; }
  const VectorXd& values() const { return x_; }
  /// Recomputes the factors and the basic values from scratch.
  void refresh() { refactor(); }
  int iterations() const { return iterations_; }

  VectorXd duals(const VectorXd& cost) const {
    VectorXd y(basis_.size());
    for (int i = 0; i < static_cast<int>(basis_.size()); ++i) y[i] = cost[basis_[i]];
    factor_.btran(y);
    return y;
  }

 private:
  void refactor() {
    factor_.factor(a_, basis_);
    x_ = b_;
    factor_.ftran(x_);
  }

  void guard() {
    if (++iterations_ > opt_.max_iterations) throw NumericalError("simplex iteration limit reached");
  }

  void price(const VectorXd& cost, VectorXd& y) const {
    for (int i = 0; i < static_cast<int>(basis_.size()); ++i) y[i] = cost[basis_[i]];
    factor_.btran(y);
  }

  double reduced_cost(const VectorXd& cost, const VectorXd& y, int j) const {
    double d = cost[j];
    for (SpMat::InnerIterator it(a_, j); it; ++it) d -= it.value() * y[it.row()];
    return d;
  }

  void load_column(int j, VectorXd& out) const {
    out.setZero();
    for (SpMat::InnerIterator it(a_, j); it; ++it) out[it.row()] = it.value();
  }

  // Harris two-pass ratio test; Bland mode takes the smallest basic index among exact ties.
  int ratio_test(const VectorXd& alpha, bool bland) const {
    const int m = static_cast<int>(basis_.size());
    constexpr double relax = 1e-9;
    double bound = kInf;
    for (int i = 0; i < m; ++i) {
      const double u = upper_[basis_[i]];
      if (alpha[i] > kPivotTol) {
        bound = std::min(bound, (std::max(0.0, x_[i]) + relax) / alpha[i]);
      } else if (alpha[i] < -kPivotTol && u < kInf) {
        bound = std::min(bound, (u - std::min(u, x_[i]) + relax) / -alpha[i]);
      }
    }
    if (bound == kInf) return -1;
    int r = -1;
    double best_mag = 0;
    double best_ratio = kInf;
    for (int i = 0; i < m; ++i) {
      const double u = upper_[basis_[i]];
      double ratio;
      if (alpha[i] > kPivotTol) {
        ratio = std::max(0.0, x_[i]) / alpha[i];
      } else if (alpha[i] < -kPivotTol && u < kInf) {
        ratio = (u - std::min(u, x_[i])) / -alpha[i];
      } else {
        continue;
      }
      if (ratio > bound) continue;
      const double mag = std::abs(alpha[i]);
      if (bland) {
        if (ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && (r < 0 || basis_[i] < basis_[r]))) {
          best_ratio = ratio;
          r = i;
        }
      } else if (mag > best_mag) {
        best_mag = mag;
        r = i;
      }
    }
    return r;
  }

  // True when every basic column is a signed unit vector, so B^-1 a_j is a_j up to signs.
  bool unit_basis() const {
    for (int j : basis_) {
      if (a_.col(j).nonZeros() != 1) return false;
      if (std::abs(SpMat::InnerIterator(a_, j).value()) != 1.0) return false;
    }
    return true;
  }

  // Accumulates rho^T A into row_, listing the nonzero positions in touched_.
  void pivot_row(const VectorXd& rho) {
    touched_.clear();
    for (int i = 0; i < rho.size(); ++i) {
      if (std::abs(rho[i]) < 1e-13) continue;
      for (RowMat::InnerIterator it(rows_, i); it; ++it) {
        const int j = static_cast<int>(it.col());
        if (row_[j] == 0.0) touched_.push_back(j);
        row_[j] += rho[i] * it.value();
        if (row_[j] == 0.0) row_[j] = 1e-300;
      }
    }
  }

  void pivot(int r, int q, const VectorXd& alpha, double step) {
    x_ -= step * alpha;
    x_[r] = step;
    where_[basis_[r]] = -1;
    basis_[r] = q;
    where_[q] = r;
    if (factor_.updates() + 1 >= opt_.refactor_interval) {
      refactor();
    } else {
      factor_.push(r, alpha);
    }
  }

  const SpMat& a_;
  RowMat rows_;
  std::vector<double> row_;
  std::vector<int> touched_;
  VectorXd b_;
  std::vector<double> upper_;
  std::vector<int> basis_;
  std::vector<int> where_;
  const SimplexOptions& opt_;
  BasisFactor factor_;
  std::vector<double> edge_;
  VectorXd x_;
  int iterations_ = 0;
};

LpSolution solve_direct(const LinearProgram& lp, const SimplexOptions& opt) {
  const int n = lp.num_variables();
  const int m = lp.num_constraints();
  const bool maximize = lp.sense() == Sense::maximize;
  const double cs = maximize ? -1.0 : 1.0;
  const auto& vars = lp.variables();
  const auto& rows = lp.constraints();

  LpSolution sol;
  sol.primal.assign(n, 0.0);
  sol.dual.assign(m, 0.0);

  // Shift lower bounds to zero and normalize rows to a non-negative right-hand side.
  std::vector<double> rhs(m);
  std::vector<double> sigma(m, 1.0);
  std::vector<RowType> type(m);
  double bscale = 1.0;
  for (int i = 0; i < m; ++i) {
    double r = rows[i].rhs;
    for (const auto& t : rows[i].terms) r -= t.coef * vars[t.var].lower;
    type[i] = rows[i].type;
    if (r < 0 || (r == 0 && type[i] == RowType::ge)) {
      sigma[i] = -1.0;
      r = -r;
      if (type[i] == RowType::le) type[i] = RowType::ge;
      else if (type[i] == RowType::ge) type[i] = RowType::le;
    }
    rhs[i] = r;
    bscale = std::max(bscale, r);
  }

  if (m == 0) {
    for (int j = 0; j < n; ++j) {
      if (cs * lp.objective()[j] < -kCostTol) {
        sol.status = LpStatus::unbounded;
        return sol;
      }
      sol.primal[j] = vars[j].lower;
    }
    sol.status = LpStatus::optimal;
    sol.objective = lp.evaluate(sol.primal);
    return sol;
  }

  int slack_count = 0;
  int art_count = 0;
  for (int i = 0; i < m; ++i) {
    if (type[i] != RowType::eq) ++slack_count;
    if (type[i] != RowType::le) ++art_count;
  }
  const int total = n + slack_count + art_count;
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<int> basis(m, -1);
  std::vector<bool> artificial(total, false);
  int next_slack = n;
  int next_art = n + slack_count;
  for (int i = 0; i < m; ++i) {
    for (const auto& t : rows[i].terms)
      if (t.coef != 0.0) trips.emplace_back(i, t.var, sigma[i] * t.coef);
    if (type[i] == RowType::le) {
      trips.emplace_back(i, next_slack, 1.0);
      basis[i] = next_slack++;
    } else {
      if (type[i] == RowType::ge) trips.emplace_back(i, next_slack++, -1.0);
      trips.emplace_back(i, next_art, 1.0);
      artificial[next_art] = true;
      basis[i] = next_art++;
    }
  }
  SpMat a(m, total);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();

  VectorXd b(m);
  for (int i = 0; i < m; ++i) b[i] = rhs[i];
  VectorXd perturbed = b;
  if (opt.perturbation > 0) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(1.0, 2.0);
    for (int i = 0; i < m; ++i) {
      const double delta = opt.perturbation * unit(rng) * (1.0 + std::abs(b[i]));
      if (type[i] == RowType::le) perturbed[i] += delta;
      else if (type[i] == RowType::ge) perturbed[i] -= std::min(delta, 0.5 * b[i]);
    }
  }

  VectorXd cost = VectorXd::Zero(total);
  for (int j = 0; j < n; ++j) cost[j] = cs * lp.objective()[j];

  Engine engine(a, perturbed, std::vector<double>(total, kInf), basis, opt);
  if (art_count > 0) {
    VectorXd phase1 = VectorXd::Zero(total);
    for (int j = 0; j < total; ++j)
      if (artificial[j]) phase1[j] = 1.0;
    engine.primal(phase1);
    double infeasibility = 0;
    for (int i = 0; i < m; ++i)
      if (artificial[engine.basis()[i]]) infeasibility += std::max(0.0, engine.values()[i]);
    if (infeasibility > 1e-8 * bscale) {
      sol.status = LpStatus::infeasible;
      sol.iterations = engine.iterations();
      return sol;
    }
    for (int j = 0; j < total; ++j)
      if (artificial[j]) engine.set_upper(j, 0.0);
    engine.retire(artificial);
  }
  if (engine.primal(cost) == Engine::Outcome::unbounded) {
    sol.status = LpStatus::unbounded;
    sol.iterations = engine.iterations();
    return sol;
  }
  if (opt.perturbation > 0) {
    engine.set_rhs(b);
    if (!engine.dual(cost, 1e-11 * bscale)) {
      sol.status = LpStatus::infeasible;
      sol.iterations = engine.iterations();
      return sol;
    }
    if (engine.primal(cost) == Engine::Outcome::unbounded) {
      sol.status = LpStatus::unbounded;
      sol.iterations = engine.iterations();
      return sol;
    }
  }

  engine.refresh();
  const auto& x = engine.values();
  const auto& final_basis = engine.basis();
  for (int i = 0; i < m; ++i)
    if (final_basis[i] < n) sol.primal[final_basis[i]] = std::max(0.0, x[i]);
  for (int j = 0; j < n; ++j) sol.primal[j] += vars[j].lower;
  const VectorXd y = engine.duals(cost);
  for (int i = 0; i < m; ++i) sol.dual[i] = cs * sigma[i] * y[i];
  sol.status = LpStatus::optimal;
  sol.objective = lp.evaluate(sol.primal);
  sol.iterations = engine.iterations();
  return sol;
}

// Solves the Lagrangian dual explicitly and reads the primal point off its multipliers.
std::optional<LpSolution> solve_via_dual(const LinearProgram& lp, const SimplexOptions& opt) {
  const int n = lp.num_variables();
  const int m = lp.num_constraints();
  const bool maximize = lp.sense() == Sense::maximize;
  const double cs = maximize ? -1.0 : 1.0;
  const auto& vars = lp.variables();
  const auto& rows = lp.constraints();

  LinearProgram d(Sense::maximize);
  struct Piece {
    int row;
    double sign;
  };
  std::vector<Piece> pieces;
  std::vector<std::vector<LpTerm>> columns(n);
  for (int i = 0; i < m; ++i) {
    double shifted = rows[i].rhs;
    for (const auto& t : rows[i].terms) shifted -= t.coef * vars[t.var].lower;
    std::vector<double> signs;
    if (rows[i].type == RowType::ge) signs = {1.0};
    if (rows[i].type == RowType::le) signs = {-1.0};
    if (rows[i].type == RowType::eq) signs = {1.0, -1.0};
    for (double s : signs) {
      const int v = d.add_variable("y" + std::to_string(i));
      d.add_objective(v, s * shifted);
      pieces.push_back({i, s});
      for (const auto& t : rows[i].terms) columns[t.var].push_back({v, s * t.coef});
    }
  }
  for (int j = 0; j < n; ++j) d.add_constraint("x" + std::to_string(j), std::move(columns[j]), RowType::le, cs * lp.objective()[j]);

  SimplexOptions inner = opt;
  inner.dualize_ratio = 0;
  LpSolution ds = solve_direct(d, inner);
  if (ds.status == LpStatus::infeasible) return std::nullopt;

  LpSolution sol;
  sol.dualized = true;
  sol.iterations = ds.iterations;
  sol.primal.assign(n, 0.0);
  sol.dual.assign(m, 0.0);
  if (ds.status == LpStatus::unbounded) {
    sol.status = LpStatus::infeasible;
    return sol;
  }
  for (std::size_t k = 0; k < pieces.size(); ++k) sol.dual[pieces[k].row] += cs * pieces[k].sign * ds.primal[k];
  for (int j = 0; j < n; ++j) sol.primal[j] = std::max(0.0, ds.dual[j]) + vars[j].lower;
  sol.status = LpStatus::optimal;
  sol.objective = lp.evaluate(sol.primal);
  return sol;
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SimplexOptions& options) {
  lp.validate();
  const bool dualize = options.dualize_ratio > 0 &&
                       lp.num_constraints() > options.dualize_ratio * std::max(1, lp.num_variables());
  // Later attempts trade speed for robustness: Devex pricing, then no perturbation at all.
  std::vector<SimplexOptions> attempts{options};
  if (options.pricing != Pricing::devex) {
    attempts.push_back(options);
    attempts.back().pricing = Pricing::devex;
  }
  if (options.perturbation > 0) {
    attempts.push_back(attempts.back());
    attempts.back().perturbation = 0;
  }
  std::string problem;
  for (const auto& opt : attempts) {
    try {
      std::optional<LpSolution> via_dual;
      if (dualize) via_dual = solve_via_dual(lp, opt);
      LpSolution sol = via_dual ? std::move(*via_dual) : solve_direct(lp, opt);
      if (sol.status != LpStatus::optimal) return sol;
      problem = check_certificate(lp, sol);
      if (problem.empty()) return sol;
      problem = "LP certificate check failed: " + problem;
    } catch (const NumericalError& e) {
      problem = e.what();
    }
  }
  throw NumericalError(problem);
}

}  // namespace lpbound
