#pragma once

#include "zerofpr/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace zerofpr {

/// A problem whose solution and smoothness constant are known in closed form.
struct AnalyticProblem {
  Problem problem;
  std::optional<Vector> known_minimizer;
  std::optional<double> known_min_value;
  double known_L_f = 1.0;
  std::string description;
};

/// f = ½xᵀQx − bᵀx, g = 0, eigenvalues of Q log-spaced in [1/condition, 1]
/// (so L_f = 1). Minimizer Q⁻¹b.
AnalyticProblem make_quadratic(Index n, double condition, std::uint64_t seed = 1);

/// f = ½‖Ax − b‖², g = λ‖·‖₁, built backwards from a planted sparse x* and a
/// dual certificate so that x* is optimal with strict complementarity:
/// |[Aᵀ(b − Ax*)]ᵢ| = λ on the support and ≤ 0.8λ off it.
AnalyticProblem make_lasso(Index m, Index n, double lambda, std::uint64_t seed = 1);

/// f = ½x², g = indicator of {−1, +1}. Both ±1 are minimizers (value ½); the
/// record carries +1.
AnalyticProblem make_example_3_3();

/// f = ½x², g = x^{5/3}. The origin is stationary but T_γ(0) = {−(5γ/3)³};
/// the global minimizer is −125/27.
AnalyticProblem make_l1_plus_power();

/// Largest of `samples` gradient-difference quotients at random pairs.
double sampled_lipschitz(const Problem& p, int samples = 100, std::uint64_t seed = 7, double scale = 1.0);

struct AuditFailure {
  int k = 0;
  std::string check;
  double excess = 0.0;  // lhs − rhs − allowance (> 0 means violated)
};

struct AuditReport {
  std::vector<AuditFailure> failures;
  std::size_t checks = 0;
  /// Most positive lhs − rhs seen, relative to 1 + |rhs|.
  double worst_slack = -std::numeric_limits<double>::infinity();
  /// Σ‖r^k‖² over accepted iterations and its bound (Φ̄₀ − φ_γ(x^K))/(σ·p_min),
  /// accumulated per constant-γ segment. Only filled for merit solvers.
  double residual_sum = 0.0;
  double residual_bound = 0.0;

  bool ok() const { return failures.empty(); }
};

/// Per-iteration audit of a trace against
///   φ(x̄) ≤ φ_γ(x) − ((1 − γL_f)/(2γ))‖x − x̄‖²
///   φ_γ(x̄) ≤ φ(x̄)
/// and, for merit solvers,
///   φ_γ(x^k) ≤ Φ̄_k,  φ_γ(x^{k+1}) ≤ Φ̄_k − σ‖r^k‖²,
///   Φ̄_{k+1} ≤ Φ̄_k − p_k σ‖r^k‖²,  Σ‖r^k‖² ≤ (Φ̄₀ − φ_γ(x^K))/(σ p_min).
/// Each inequality is allowed rel_slack·(1 + |rhs|). Checks whose inputs
/// the solver did not record are skipped.
AuditReport audit_inequalities(const RunTrace& trace, double L_f, double rel_slack = 1e-8);

} // namespace zerofpr
