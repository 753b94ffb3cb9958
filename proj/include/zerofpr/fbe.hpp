#pragma once

#include "zerofpr/problem.hpp"

#include <cstdint>
#include <stdexcept>

namespace zerofpr {

/// Thrown when an oracle returns NaN/±inf where a finite value is required.
class NonfiniteValue : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Thrown when the Lipschitz estimate has been raised more times than allowed.
class GammaFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// One forward-backward evaluation at x.
///
///   x_bar ∈ T_γ(x) = prox_{γg}(x − γ∇f(x))
///   r     = (x − x_bar)/γ
///   fbe   = φ_γ(x) = f(x) − (γ/2)‖∇f(x)‖² + g^γ(x − γ∇f(x))
///
/// The Moreau envelope term is recovered from the prox output itself,
/// g^γ(w) = g(x_bar) + ‖w − x_bar‖²/(2γ), so φ_γ costs nothing beyond T_γ.
struct ProxGradStep {
  Vector x;
  double f_x = 0.0;
  Vector grad_f_x;
  Vector x_bar;
  double g_xbar = 0.0;
  Vector r;
  double fbe = 0.0;
  double gamma = 0.0;

  double residual_norm() const { return r.norm(); }
};

/// One smooth eval plus one prox. Throws std::domain_error for γ outside
/// (0, γ_g) and NonfiniteValue if either oracle produces a nonfinite value.
ProxGradStep prox_grad_step(const Problem& p, const Vector& x, double gamma);

/// Lipschitz test used by the adaptive stepsize rule: true iff
///   f(x̄) ≤ f(x) − ⟨∇f(x), x − x̄⟩ + (L/2)‖x − x̄‖²
/// holds (up to a few ulps of f(x)). Costs one smooth eval.
bool check_quadratic_bound(const ProxGradStep& step, const Problem& p, double L);

/// Stepsize state for one solver run.
struct GammaManager {
  double L = 1.0;
  double gamma = 0.95;
  double sigma = 0.0;
  double alpha = 0.5;
  double gamma_fraction = 0.95;
  int adjustments = 0;
  int max_adjustments = 60;

  /// γ = gamma_fraction·min(1/L, γ_g), σ = sigma_fraction·γ(1 − γL)/2.
  static GammaManager from_lipschitz(double L, ExtendedReal gamma_g, double gamma_fraction = 0.95,
                                     double sigma_fraction = 0.5, double alpha = 0.5,
                                     int max_adjustments = 60);

  /// Largest σ allowed for the current γ and L.
  double sigma_bound() const { return gamma * (1.0 - gamma * L) / 2.0; }
};

/// L ← L/α, γ ← αγ, σ ← ασ. Throws GammaFailure once the adjustment cap is hit.
GammaManager gamma_backtrack(GammaManager mgr);

/// Directional curvature ‖∇f(x0 + δe) − ∇f(x0)‖/δ along a seeded random unit
/// direction e, with δ = 1e-6·(1 + ‖x0‖), floored at 1e-12. Two smooth evals.
double estimate_initial_L(const Problem& p, const Vector& x0, std::uint64_t seed = 0x5eed);

} // namespace zerofpr
