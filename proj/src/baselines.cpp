#include "zerofpr/solver.hpp"

#include "detail/run_context.hpp"

#include <cmath>

namespace zerofpr {

namespace {

// Evaluates T_γ at y, shrinking γ while the quadratic upper bound fails
// (adaptive mode only). Returns false once the adjustment cap is exhausted.
bool adaptive_step(const Problem& p, const Vector& y, const SolverConfig& cfg, GammaManager& mgr,
                   ProxGradStep& step, bool& shrank) {
  step = prox_grad_step(p, y, mgr.gamma);
  while (cfg.adaptive_gamma && check_quadratic_bound(step, p, mgr.L) == false) {
    try {
      mgr = gamma_backtrack(mgr);
    } catch (const GammaFailure&) {
      return false;
    }
    step = prox_grad_step(p, y, mgr.gamma);
    shrank = true;
  }
  return true;
}

double tolerance(const SolverConfig& cfg, const Vector& x0) {
  return cfg.relative_tol ? cfg.tol * (1.0 + x0.norm()) : cfg.tol;
}

} // namespace

RunTrace ifbs_solve(const Problem& p, const Vector& x0, const SolverConfig& cfg) {
  cfg.validate();
  if (x0.size() != p.dimension || !x0.allFinite()) throw std::invalid_argument("ifbs_solve: bad x0");
  detail::RunContext ctx(p, "ifbs");
  GammaManager mgr = detail::initial_gamma(p, x0, cfg);
  const double tol = tolerance(cfg, x0);

  Vector x = x0;
  Vector x_prev = x0;
  ProxGradStep step;
  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    const Vector y = x + cfg.inertia * (x - x_prev);
    bool shrank = false;
    const bool ok = adaptive_step(p, y, cfg, mgr, step, shrank);
    rec.gamma_reset = shrank;
    ctx.fill(rec, step, kUnknown, mgr);
    if (!ok) {
      ctx.push(rec);
      return ctx.finish(RunStatus::gamma_failure, step);
    }
    if (step.residual_norm() <= tol) {
      ctx.push(rec);
      return ctx.finish(RunStatus::converged, step);
    }
    if (k >= cfg.max_iters) {
      ctx.push(rec);
      return ctx.finish(RunStatus::max_iters, step);
    }
    rec.tau = 1.0;
    ctx.push(rec);
    x_prev = std::move(x);
    x = step.x_bar;
  }
}

RunTrace afbs_solve(const Problem& p, const Vector& x0, const SolverConfig& cfg) {
  cfg.validate();
  if (x0.size() != p.dimension || !x0.allFinite()) throw std::invalid_argument("afbs_solve: bad x0");
  detail::RunContext ctx(p, "afbs");
  GammaManager mgr = detail::initial_gamma(p, x0, cfg);
  const double tol = tolerance(cfg, x0);

  // Start from one plain FB step so that the monitored objective is finite.
  ProxGradStep step;
  bool shrank = false;
  if (!adaptive_step(p, x0, cfg, mgr, step, shrank)) return ctx.finish(RunStatus::gamma_failure, step);

  Vector x = step.x_bar;
  Vector x_prev = x;
  Vector z = x;
  double F_x = p.smooth->eval(x).value + step.g_xbar;
  double t_prev = 0.0;
  double t = 1.0;
  double q = 1.0;
  double c = F_x;

  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    const Vector y = x + (t_prev / t) * (z - x) + ((t_prev - 1.0) / t) * (x - x_prev);
    shrank = false;
    const bool ok = adaptive_step(p, y, cfg, mgr, step, shrank);
    rec.gamma_reset = shrank;
    ctx.fill(rec, step, c, mgr);
    if (!ok) {
      ctx.push(rec);
      return ctx.finish(RunStatus::gamma_failure, step);
    }
    if (step.residual_norm() <= tol) {
      ctx.push(rec);
      return ctx.finish(RunStatus::converged, step);
    }
    if (k >= cfg.max_iters) {
      ctx.push(rec);
      return ctx.finish(RunStatus::max_iters, step);
    }

    const Vector z_new = step.x_bar;
    const double F_z = p.smooth->eval(z_new).value + step.g_xbar;
    rec.phi_xbar = F_z;
    Vector x_new;
    double F_new = 0.0;
    if (F_z <= c - mgr.sigma * (z_new - y).squaredNorm()) {
      x_new = z_new;
      F_new = F_z;
      rec.tau = 1.0;
    } else {
      const ProxGradStep plain = prox_grad_step(p, x, mgr.gamma);
      const double F_v = p.smooth->eval(plain.x_bar).value + plain.g_xbar;
      if (F_z <= F_v) {
        x_new = z_new;
        F_new = F_z;
      } else {
        x_new = plain.x_bar;
        F_new = F_v;
      }
      rec.tau = 0.0;
    }

    t_prev = t;
    t = 0.5 * (std::sqrt(4.0 * t * t + 1.0) + 1.0);
    const double q_new = cfg.eta * q + 1.0;
    c = (cfg.eta * q * c + F_new) / q_new;
    q = q_new;
    rec.p = 1.0 / q;
    ctx.push(rec);

    x_prev = std::move(x);
    x = std::move(x_new);
    z = z_new;
  }
}

} // namespace zerofpr
