#include "zerofpr/fbe.hpp"

#include "zerofpr/random.hpp"

#include <cmath>
#include <limits>

namespace zerofpr {

ProxGradStep prox_grad_step(const Problem& p, const Vector& x, double gamma) {
  ProxGradStep s;
  s.gamma = gamma;
  s.x = x;
  SmoothEval fe = p.smooth->eval(x);
  if (!std::isfinite(fe.value) || !fe.gradient.allFinite()) {
    throw NonfiniteValue("prox_grad_step: nonfinite f or gradient");
  }
  s.f_x = fe.value;
  s.grad_f_x = std::move(fe.gradient);

  Vector forward = x - gamma * s.grad_f_x;
  ProxResult pr = p.nonsmooth->prox(forward, gamma);
  if (!pr.g_at_z.is_finite() || !pr.z.allFinite()) {
    throw NonfiniteValue("prox_grad_step: prox returned a nonfinite point or value");
  }
  s.x_bar = std::move(pr.z);
  s.g_xbar = pr.g_at_z.value();
  s.r = (x - s.x_bar) / gamma;
  const double moreau = s.g_xbar + (forward - s.x_bar).squaredNorm() / (2.0 * gamma);
  s.fbe = s.f_x - 0.5 * gamma * s.grad_f_x.squaredNorm() + moreau;
  if (!std::isfinite(s.fbe)) throw NonfiniteValue("prox_grad_step: nonfinite FBE");
  return s;
}

bool check_quadratic_bound(const ProxGradStep& step, const Problem& p, double L) {
  const Vector diff = step.x - step.x_bar;
  const double f_bar = p.smooth->eval(step.x_bar).value;
  const double bound = step.f_x - step.grad_f_x.dot(diff) + 0.5 * L * diff.squaredNorm();
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(step.f_x));
  return f_bar <= bound + slack;
}

GammaManager GammaManager::from_lipschitz(double L, ExtendedReal gamma_g, double gamma_fraction,
                                          double sigma_fraction, double alpha, int max_adjustments) {
  if (!(L > 0.0)) throw std::invalid_argument("GammaManager: L must be positive");
  if (!(gamma_fraction > 0.0 && gamma_fraction < 1.0)) {
    throw std::invalid_argument("GammaManager: gamma_fraction must lie in (0,1)");
  }
  if (!(sigma_fraction > 0.0 && sigma_fraction < 1.0)) {
    throw std::invalid_argument("GammaManager: sigma_fraction must lie in (0,1)");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("GammaManager: alpha must lie in (0,1)");
  GammaManager m;
  m.L = L;
  m.alpha = alpha;
  m.gamma_fraction = gamma_fraction;
  m.max_adjustments = max_adjustments;
  const double cap = gamma_g.is_finite() ? std::min(1.0 / L, gamma_g.value()) : 1.0 / L;
  m.gamma = gamma_fraction * cap;
  m.sigma = sigma_fraction * m.sigma_bound();
  return m;
}

GammaManager gamma_backtrack(GammaManager mgr) {
  if (mgr.adjustments >= mgr.max_adjustments) {
    throw GammaFailure("gamma_backtrack: adjustment cap exceeded");
  }
  mgr.L /= mgr.alpha;
  mgr.gamma *= mgr.alpha;
  mgr.sigma *= mgr.alpha;
  ++mgr.adjustments;
  return mgr;
}

double estimate_initial_L(const Problem& p, const Vector& x0, std::uint64_t seed) {
  if (!x0.allFinite()) throw std::invalid_argument("estimate_initial_L: nonfinite x0");
  Rng rng(seed);
  Vector e = rng.normal_vector(x0.size());
  if (e.norm() == 0.0) e(0) = 1.0;
  e.normalize();
  const double delta = 1e-6 * (1.0 + x0.norm());
  const Vector g0 = p.smooth->eval(x0).gradient;
  const Vector g1 = p.smooth->eval(x0 + delta * e).gradient;
  return std::max((g1 - g0).norm() / delta, 1e-12);
}

} // namespace zerofpr
