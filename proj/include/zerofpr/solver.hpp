#pragma once

#include "zerofpr/directions.hpp"
#include "zerofpr/fbe.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace zerofpr {

enum class RunStatus { converged, max_iters, linesearch_failure, gamma_failure };

std::string to_string(RunStatus s);

struct SolverConfig {
  /// Fixed stepsize; when absent γ = gamma_fraction·min(1/L, γ_g).
  std::optional<double> gamma;
  /// Overrides the problem's Lipschitz estimate.
  std::optional<double> lipschitz;
  double gamma_fraction = 0.95;
  /// σ = sigma_fraction·γ(1 − γL)/2.
  double sigma_fraction = 0.5;
  double beta = 0.5;
  double p_min = 0.05;
  double eta = 0.85;
  double tol = 1e-6;
  /// Stop on ‖r‖ ≤ tol·(1 + ‖x⁰‖) instead of ‖r‖ ≤ tol.
  bool relative_tol = false;
  int max_iters = 10000;
  int max_linesearch = 40;
  bool adaptive_gamma = false;
  double alpha = 0.5;
  int max_gamma_adjustments = 60;
  /// Extrapolation weight of the inertial baseline.
  double inertia = 0.2;
  /// Keep r̄ᵏ and dᵏ in the trace (Dennis–Moré diagnostics).
  bool record_directions = false;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

/// Zhang–Hager averaging of merit values.
struct NonmonotoneState {
  double phibar = 0.0;
  double Q = 1.0;
  double p = 1.0;
};

/// p = max(p_min, 1/(ηQ + 1)), Φ̄⁺ = (1 − p)Φ̄ + p·φ_new, Q⁺ = ηQ + 1.
NonmonotoneState update_nonmonotone(NonmonotoneState state, double phi_new, double p_min, double eta);

inline constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();

/// One row per iteration. Oracle counts are cumulative from the start of the
/// run. Quantities a solver does not compute are NaN.
struct IterationRecord {
  int k = 0;
  double res_norm = 0.0;   // ‖r^k‖ at the point where T_γ was evaluated
  double fbe = 0.0;        // φ_γ at that point
  double phibar = kUnknown;
  double tau = kUnknown;   // accepted stepsize; NaN on the terminal row
  int backtracks = 0;
  double gamma = 0.0;
  double sigma = 0.0;
  double p = kUnknown;     // averaging weight used to form Φ̄_{k+1}
  double phi_xbar = kUnknown;  // φ(x̄^k)
  double fbe_xbar = kUnknown;  // φ_γ(x̄^k)
  double fbe_next = kUnknown;  // φ_γ(x^{k+1})
  bool gamma_reset = false;    // γ shrank during this iteration
  std::uint64_t smooth_evals = 0;
  std::uint64_t prox_evals = 0;
  std::uint64_t matvecs = 0;
  double elapsed_ms = 0.0;
};

struct RunTrace {
  std::string solver;
  std::vector<IterationRecord> iters;
  RunStatus status = RunStatus::max_iters;
  /// Last forward-backward point x̄ (always in dom g).
  Vector solution;
  /// Last iterate x^k.
  Vector final_point;
  double final_residual = 0.0;
  double final_fbe = 0.0;
  double p_min = 0.0;
  /// True for solvers whose accepted iterates satisfy the nonmonotone
  /// sufficient-decrease test (ZeroFPR and FBS).
  bool merit_linesearch = false;
  OracleCounts totals;
  std::vector<Vector> rbar;
  std::vector<Vector> directions;

  int iterations() const { return iters.empty() ? 0 : iters.back().k; }
};

/// Nonmonotone-linesearch quasi-Newton forward-backward method. The engine is
/// reset at the start and whenever γ shrinks.
RunTrace zerofpr_solve(const Problem& p, const Vector& x0, const SolverConfig& cfg,
                       DirectionEngine& engine);

/// x^{k+1} = x̄^k (ZeroFPR with the null engine).
RunTrace fbs_solve(const Problem& p, const Vector& x0, const SolverConfig& cfg);

/// x^{k+1} ∈ T_γ(x^k + β(x^k − x^{k−1})), β = cfg.inertia. Residuals are
/// measured at the extrapolated point.
RunTrace ifbs_solve(const Problem& p, const Vector& x0, const SolverConfig& cfg);

/// Monitored nonmonotone accelerated FBS: the extrapolated FB point is kept
/// only if it passes a sufficient-decrease test against the running average
/// of objective values, otherwise the better of it and the plain FB point
/// from x^k is taken. Residuals are measured at the extrapolated point.
RunTrace afbs_solve(const Problem& p, const Vector& x0, const SolverConfig& cfg);

/// Dispatches "fbs", "ifbs", "afbs", "zerofpr-<engine>".
RunTrace solve_by_name(const std::string& solver, const Problem& p, const Vector& x0,
                       const SolverConfig& cfg);

} // namespace zerofpr
