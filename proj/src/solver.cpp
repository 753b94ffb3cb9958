#include "zerofpr/solver.hpp"

#include "detail/run_context.hpp"

#include <cmath>

namespace zerofpr {

std::string to_string(RunStatus s) {
  switch (s) {
  case RunStatus::converged: return "converged";
  case RunStatus::max_iters: return "max_iters";
  case RunStatus::linesearch_failure: return "linesearch_failure";
  case RunStatus::gamma_failure: return "gamma_failure";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  auto open01 = [](double v) { return v > 0.0 && v < 1.0; };
  if (gamma && !(*gamma > 0.0)) throw std::invalid_argument("SolverConfig: gamma must be positive");
  if (lipschitz && !(*lipschitz > 0.0)) throw std::invalid_argument("SolverConfig: lipschitz must be positive");
  if (!open01(gamma_fraction)) throw std::invalid_argument("SolverConfig: gamma_fraction in (0,1)");
  if (!open01(sigma_fraction)) throw std::invalid_argument("SolverConfig: sigma_fraction in (0,1)");
  if (!open01(beta)) throw std::invalid_argument("SolverConfig: beta in (0,1)");
  if (!open01(p_min)) throw std::invalid_argument("SolverConfig: p_min in (0,1)");
  if (!open01(eta) && eta != 0.0) throw std::invalid_argument("SolverConfig: eta in [0,1)");
  if (!open01(alpha)) throw std::invalid_argument("SolverConfig: alpha in (0,1)");
  if (!(tol >= 0.0)) throw std::invalid_argument("SolverConfig: tol must be nonnegative");
  if (max_iters < 0 || max_linesearch < 1) throw std::invalid_argument("SolverConfig: bad iteration caps");
  if (!(inertia >= 0.0 && inertia < 1.0)) throw std::invalid_argument("SolverConfig: inertia in [0,1)");
}

NonmonotoneState update_nonmonotone(NonmonotoneState state, double phi_new, double p_min, double eta) {
  const double p = std::max(p_min, 1.0 / (eta * state.Q + 1.0));
  return {(1.0 - p) * state.phibar + p * phi_new, eta * state.Q + 1.0, p};
}

namespace detail {

GammaManager initial_gamma(const Problem& p, const Vector& x0, const SolverConfig& cfg) {
  double L = 0.0;
  if (cfg.lipschitz) L = *cfg.lipschitz;
  else if (p.lipschitz_estimate) L = *p.lipschitz_estimate;
  else if (cfg.adaptive_gamma) L = estimate_initial_L(p, x0);
  else throw std::invalid_argument("solver: no Lipschitz estimate; set one or enable adaptive_gamma");

  GammaManager mgr = GammaManager::from_lipschitz(L, p.nonsmooth->gamma_threshold(), cfg.gamma_fraction,
                                                  cfg.sigma_fraction, cfg.alpha, cfg.max_gamma_adjustments);
  if (cfg.gamma) {
    if (!(ExtendedReal(*cfg.gamma) < p.nonsmooth->gamma_threshold()) || *cfg.gamma * L >= 1.0) {
      throw std::invalid_argument("solver: gamma must satisfy gamma < min(1/L, gamma_g)");
    }
    mgr.gamma = *cfg.gamma;
    mgr.sigma = cfg.sigma_fraction * mgr.sigma_bound();
  }
  return mgr;
}

} // namespace detail

RunTrace zerofpr_solve(const Problem& p, const Vector& x0, const SolverConfig& cfg, DirectionEngine& engine) {
  cfg.validate();
  if (x0.size() != p.dimension || !x0.allFinite()) throw std::invalid_argument("zerofpr_solve: bad x0");

  detail::RunContext ctx(p, "zerofpr-" + engine.name());
  RunTrace& trace = ctx.trace;
  trace.merit_linesearch = true;
  trace.p_min = cfg.p_min;

  GammaManager mgr = detail::initial_gamma(p, x0, cfg);
  const double tol = cfg.relative_tol ? cfg.tol * (1.0 + x0.norm()) : cfg.tol;
  engine.reset();

  ProxGradStep step = prox_grad_step(p, x0, mgr.gamma);
  NonmonotoneState nm{step.fbe, 1.0, 1.0};

  // Symmetrized BFGS needs ∇f(x̄^{k+1}) to form y_k, which only becomes
  // available once the next iteration evaluates T_γ at x̄^{k+1}.
  struct Pending {
    Vector s;
    Vector base;
  };
  std::optional<Pending> pending;
  // The accepted trial already passed the bound check with the current L.
  bool bound_known = false;

  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;

    bool converged = false;
    try {
      for (;;) {
        if (step.residual_norm() <= tol) {
          converged = true;
          break;
        }
        if (!cfg.adaptive_gamma || bound_known || check_quadratic_bound(step, p, mgr.L)) break;
        mgr = gamma_backtrack(mgr);
        step = prox_grad_step(p, step.x, mgr.gamma);
        nm = NonmonotoneState{step.fbe, 1.0, 1.0};
        engine.reset();
        pending.reset();
        rec.gamma_reset = true;
      }
    } catch (const GammaFailure&) {
      ctx.fill(rec, step, nm.phibar, mgr);
      ctx.push(std::move(rec));
      return ctx.finish(RunStatus::gamma_failure, step);
    }

    ctx.fill(rec, step, nm.phibar, mgr);
    if (converged) {
      ctx.push(std::move(rec));
      return ctx.finish(RunStatus::converged, step);
    }
    if (k >= cfg.max_iters) {
      ctx.push(std::move(rec));
      return ctx.finish(RunStatus::max_iters, step);
    }

    // Direction from the residual at x̄^k.
    Vector d;
    std::optional<ProxGradStep> bar;
    Vector rhs;
    if (engine.is_null()) {
      d = Vector::Zero(step.x.size());
    } else {
      bar = prox_grad_step(p, step.x_bar, mgr.gamma);
      rec.fbe_xbar = bar->fbe;
      rec.phi_xbar = bar->f_x + step.g_xbar;
      if (engine.symmetrized()) {
        rhs = symmetrized_bfgs_residual(*bar, p);
        if (pending) {
          const Vector current = step.r + bar->grad_f_x - step.grad_f_x;
          engine.push(pending->s, current - pending->base);
          pending.reset();
        }
      } else {
        rhs = bar->r;
      }
      d = engine.apply(rhs);
      if (!d.allFinite()) d.setZero();
    }

    // Nonmonotone linesearch on φ_γ against Φ̄_k − σ‖r^k‖². With adaptive γ a
    // trial must also satisfy the quadratic bound, otherwise φ_γ need not
    // majorize φ there and a far-away trial can look spuriously good.
    bound_known = false;
    const double threshold = nm.phibar - mgr.sigma * step.r.squaredNorm();
    std::optional<ProxGradStep> trial;
    double tau = 1.0;
    int backtracks = 0;
    if (d.squaredNorm() == 0.0) {
      trial = bar ? *bar : prox_grad_step(p, step.x_bar, mgr.gamma);
      if (!(trial->fbe <= threshold)) trial.reset();
    } else {
      for (int m = 0; m < cfg.max_linesearch; ++m) {
        try {
          ProxGradStep cand = prox_grad_step(p, step.x_bar + tau * d, mgr.gamma);
          if (cand.fbe <= threshold && (!cfg.adaptive_gamma || check_quadratic_bound(cand, p, mgr.L))) {
            trial = std::move(cand);
            bound_known = cfg.adaptive_gamma;
            break;
          }
        } catch (const NonfiniteValue&) {
        }
        tau *= cfg.beta;
        ++backtracks;
      }
      if (!trial) {
        // τ = 0: the plain forward-backward point always satisfies the test
        // when σ is in range.
        tau = 0.0;
        if (bar->fbe <= threshold) trial = *bar;
      }
    }
    rec.backtracks = backtracks;
    if (!trial) {
      ctx.push(std::move(rec));
      return ctx.finish(RunStatus::linesearch_failure, step);
    }
    rec.tau = tau;
    rec.fbe_next = trial->fbe;
    if (std::isnan(rec.phi_xbar) && trial->x == step.x_bar) rec.phi_xbar = trial->f_x + step.g_xbar;

    if (!engine.is_null()) {
      Vector s = trial->x - step.x_bar;
      if (engine.symmetrized()) {
        pending = Pending{std::move(s), rhs};
      } else {
        engine.push(s, trial->r - bar->r);
      }
    }
    if (cfg.record_directions && bar) {
      trace.rbar.push_back(bar->r);
      trace.directions.push_back(d);
    }

    nm = update_nonmonotone(nm, trial->fbe, cfg.p_min, cfg.eta);
    rec.p = nm.p;
    ctx.push(std::move(rec));
    step = std::move(*trial);
  }
}

RunTrace fbs_solve(const Problem& p, const Vector& x0, const SolverConfig& cfg) {
  NullEngine engine;
  RunTrace t = zerofpr_solve(p, x0, cfg, engine);
  t.solver = "fbs";
  return t;
}

RunTrace solve_by_name(const std::string& solver, const Problem& p, const Vector& x0,
                       const SolverConfig& cfg) {
  if (solver == "fbs") return fbs_solve(p, x0, cfg);
  if (solver == "ifbs") return ifbs_solve(p, x0, cfg);
  if (solver == "afbs") return afbs_solve(p, x0, cfg);
  const std::string prefix = "zerofpr-";
  if (solver.rfind(prefix, 0) == 0) {
    auto engine = make_engine(solver.substr(prefix.size()));
    return zerofpr_solve(p, x0, cfg, *engine);
  }
  throw std::invalid_argument("unknown solver '" + solver + "'");
}

} // namespace zerofpr
