#pragma once

#include "zerofpr/fbe.hpp"

#include <optional>
#include <string>
#include <vector>

namespace zerofpr {

/// Central-difference step (machine ε)^{1/3}·(1 + ‖x‖).
double fd_step(const Vector& x);

/// Largest γ ∈ (0, γ_max] with ‖x − T_γ(x)‖ ≤ tol·(1 + ‖x‖), found by
/// bisection to resolution γ_max·2⁻⁴⁰; 0 if no γ passes. Assumes the
/// predicate is monotone in γ (γ-critical ⇒ γ'-critical for γ' < γ).
/// Throws std::domain_error when γ_max ≥ γ_g.
double estimate_criticality_threshold(const Problem& p, const Vector& x, double gamma_max, double tol = 1e-10);

/// Checks whether x ↦ T_γ(x) jumps between x ± h·eᵢ, i.e. whether the
/// selection looks single-valued and locally Lipschitz around x.
bool prox_looks_single_valued(const Problem& p, const Vector& x, double gamma);

/// Central-difference Hessian of f from gradient differences (symmetrized).
Matrix fd_hessian(const Problem& p, const Vector& x);

/// Central-difference Jacobian of R_γ.
Matrix fd_residual_jacobian(const Problem& p, const Vector& x, double gamma);

struct GradientCheck {
  /// ‖∇_FD φ_γ − Q_γR_γ‖∞ / (1 + ‖Q_γR_γ‖∞)
  double max_rel_error = 0.0;
  bool prox_single_valued = true;
  Vector fd_gradient;
  Vector model_gradient;
};

/// Compares a central-difference gradient of φ_γ with Q_γ(x)R_γ(x),
/// Q_γ = I − γ∇²f(x) from an FD Hessian.
GradientCheck fd_gradient_check_fbe(const Problem& p, const Vector& x, double gamma);

struct SecondOrderReport {
  Matrix J_R;
  Matrix Q_gamma;
  Matrix H_fbe;  // Q_γ·J_R
  double symmetry_defect = 0.0;  // ‖H − Hᵀ‖_F/‖H‖_F
  double min_eigenvalue = 0.0;   // of (H + Hᵀ)/2
  double residual_norm = 0.0;
  bool prox_single_valued = true;
  /// Set when a probe crosses a nonsmoothness of the prox.
  std::optional<std::string> warning;
};

/// FD second-order objects at a (numerically) critical point. Throws
/// std::invalid_argument when ‖R_γ(x*)‖ > 1e-8·(1 + ‖x*‖).
SecondOrderReport second_order_report(const Problem& p, const Vector& x_star, double gamma);

/// ‖r̄ᵏ + J·dᵏ‖/‖dᵏ‖ per iteration; nullopt where dᵏ = 0.
std::vector<std::optional<double>> dennis_more_ratio(const std::vector<Vector>& rbar,
                                                     const std::vector<Vector>& directions,
                                                     const Matrix& J_R_star);

enum class RateClass { sublinear, linear, superlinear };

std::string to_string(RateClass c);

struct RateReport {
  std::vector<double> q_factors;  // over the tail below initial/10
  RateClass classification = RateClass::sublinear;
  double linear_factor = 0.0;     // mean of the last window when linear
  std::size_t window = 0;
};

/// Q-factors ‖e^{k+1}‖/‖e^k‖ on the entries below initial/10.
/// superlinear: last window strictly decreasing and final factor < 0.1;
/// sublinear: last-window mean ≥ 0.99, or factors increasing throughout
///   the tail and ending above 0.9;
/// linear otherwise.
/// Throws std::invalid_argument with fewer than 10 tail entries.
RateReport classify_rate(const std::vector<double>& residual_norms, std::size_t window = 3);

} // namespace zerofpr
