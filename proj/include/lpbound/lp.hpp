#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpbound {

enum class Sense { maximize, minimize };
enum class RowType { le, ge, eq };
enum class LpStatus { optimal, unbounded, infeasible };

std::string to_string(LpStatus s);

struct LpTerm {
  int var = 0;
  double coef = 0;
};

struct LpVariable {
  std::string name;
  double lower = 0;
};

struct LpConstraint {
  std::string name;
  std::vector<LpTerm> terms;
  RowType type = RowType::le;
  double rhs = 0;
};

/// A sparse LP over variables bounded below (lower ≥ 0) and unbounded above.
class LinearProgram {
 public:
  explicit LinearProgram(Sense sense = Sense::maximize) : sense_(sense) {}

  int add_variable(std::string name, double lower = 0);
  int add_constraint(std::string name, std::vector<LpTerm> terms, RowType type, double rhs);
  void set_objective(std::vector<LpTerm> terms);
  void add_objective(int var, double coef);

  Sense sense() const { return sense_; }
  const std::vector<LpVariable>& variables() const { return vars_; }
  const std::vector<LpConstraint>& constraints() const { return rows_; }
  const std::vector<double>& objective() const { return obj_; }
  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }

  /// Throws std::invalid_argument for dangling indices, non-finite numbers or negative lower bounds.
  void validate() const;
  /// Objective value of a point.
  double evaluate(const std::vector<double>& x) const;
  /// CPLEX LP text for cross-checking with external solvers.
  std::string to_lp_format() const;

 private:
  Sense sense_;
  std::vector<LpVariable> vars_;
  std::vector<LpConstraint> rows_;
  std::vector<double> obj_;
};

/// Dual values use the sensitivity convention dual[i] = ∂(optimal objective)/∂rhs[i]. In a
/// maximization, ≤ rows get dual ≥ 0 and ≥ rows dual ≤ 0; a minimization flips both signs.
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = 0;
  std::vector<double> primal;
  std::vector<double> dual;
  int iterations = 0;
  bool dualized = false;
  double primal_residual = 0;
  double complementarity = 0;
  double duality_gap = 0;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Pricing { dantzig, devex, steepest_edge };

struct SimplexOptions {
  int refactor_interval = 64;
  /// Entering-column rule before the Bland fallback.
  Pricing pricing = Pricing::steepest_edge;
  /// Consecutive degenerate pivots before switching from Dantzig to Bland pricing.
  int bland_after = 40;
  /// Relative size of the random right-hand-side relaxation used against degeneracy; 0 disables.
  double perturbation = 1e-6;
  /// Solve the explicit dual when rows outnumber columns by this factor; 0 disables.
  double dualize_ratio = 2.0;
  int max_iterations = 2'000'000;
  std::uint64_t seed = 0x5eed;
};

/// Revised two-phase simplex over an LU-factored basis. Optimal results are verified against
/// primal feasibility (1e-9), complementary slackness (1e-6) and the duality gap (1e-6,
/// relative). A failed check or a numerical breakdown triggers a retry with Devex pricing and
/// then without perturbation; NumericalError is thrown when every attempt fails.
LpSolution solve(const LinearProgram& lp, const SimplexOptions& options = {});

/// Any solver honouring the LpSolution contract can stand in for the bundled one.
using LpSolver = std::function<LpSolution(const LinearProgram&)>;

/// Re-checks an optimal solution; returns an empty string when it satisfies the contract.
std::string check_certificate(const LinearProgram& lp, LpSolution& sol);

}  // namespace lpbound
