#include "zerofpr/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace zerofpr {

double fd_step(const Vector& x) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + x.norm());
}

double estimate_criticality_threshold(const Problem& p, const Vector& x, double gamma_max, double tol) {
  if (!x.allFinite()) throw std::invalid_argument("estimate_criticality_threshold: nonfinite x");
  if (!(gamma_max > 0.0) || !(ExtendedReal(gamma_max) < p.nonsmooth->gamma_threshold())) {
    throw std::domain_error("estimate_criticality_threshold: gamma_max must lie in (0, gamma_g)");
  }
  const double scale = tol * (1.0 + x.norm());
  auto fixed = [&](double gamma) { return (x - prox_grad_step(p, x, gamma).x_bar).norm() <= scale; };

  if (fixed(gamma_max)) return gamma_max;
  double lo = 0.0;
  double hi = gamma_max;
  const double resolution = std::ldexp(gamma_max, -40);
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (fixed(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

bool prox_looks_single_valued(const Problem& p, const Vector& x, double gamma) {
  const double h = fd_step(x);
  const double L = p.lipschitz_estimate.value_or(1.0 / gamma);
  const double limit = 10.0 * h * (1.0 + gamma * L);
  const Vector center = prox_grad_step(p, x, gamma).x_bar;
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    for (double sgn : {1.0, -1.0}) {
      probe(i) = x(i) + sgn * h;
      if ((prox_grad_step(p, probe, gamma).x_bar - center).norm() > limit) return false;
    }
    probe(i) = x(i);
  }
  return true;
}

Matrix fd_hessian(const Problem& p, const Vector& x) {
  const double h = fd_step(x);
  const Index n = x.size();
  Matrix H(n, n);
  Vector probe = x;
  for (Index i = 0; i < n; ++i) {
    probe(i) = x(i) + h;
    const Vector gp = p.smooth->eval(probe).gradient;
    probe(i) = x(i) - h;
    const Vector gm = p.smooth->eval(probe).gradient;
    probe(i) = x(i);
    H.col(i) = (gp - gm) / (2.0 * h);
  }
  return 0.5 * (H + H.transpose());
}

Matrix fd_residual_jacobian(const Problem& p, const Vector& x, double gamma) {
  const double h = fd_step(x);
  const Index n = x.size();
  Matrix J(n, n);
  Vector probe = x;
  for (Index i = 0; i < n; ++i) {
    probe(i) = x(i) + h;
    const Vector rp = prox_grad_step(p, probe, gamma).r;
    probe(i) = x(i) - h;
    const Vector rm = prox_grad_step(p, probe, gamma).r;
    probe(i) = x(i);
    J.col(i) = (rp - rm) / (2.0 * h);
  }
  return J;
}

GradientCheck fd_gradient_check_fbe(const Problem& p, const Vector& x, double gamma) {
  GradientCheck out;
  out.prox_single_valued = prox_looks_single_valued(p, x, gamma);
  const double h = fd_step(x);
  const Index n = x.size();
  out.fd_gradient.resize(n);
  Vector probe = x;
  for (Index i = 0; i < n; ++i) {
    probe(i) = x(i) + h;
    const double fp = prox_grad_step(p, probe, gamma).fbe;
    probe(i) = x(i) - h;
    const double fm = prox_grad_step(p, probe, gamma).fbe;
    probe(i) = x(i);
    out.fd_gradient(i) = (fp - fm) / (2.0 * h);
  }
  const Matrix Q = Matrix::Identity(n, n) - gamma * fd_hessian(p, x);
  out.model_gradient = Q * prox_grad_step(p, x, gamma).r;
  out.max_rel_error = (out.fd_gradient - out.model_gradient).lpNorm<Eigen::Infinity>() /
                      (1.0 + out.model_gradient.lpNorm<Eigen::Infinity>());
  return out;
}

SecondOrderReport second_order_report(const Problem& p, const Vector& x_star, double gamma) {
  const ProxGradStep center = prox_grad_step(p, x_star, gamma);
  SecondOrderReport rep;
  rep.residual_norm = center.residual_norm();
  if (rep.residual_norm > 1e-8 * (1.0 + x_star.norm())) {
    throw std::invalid_argument("second_order_report: point is not numerically critical");
  }
  const Index n = x_star.size();
  const double h = fd_step(x_star);

  rep.prox_single_valued = prox_looks_single_valued(p, x_star, gamma);
  rep.J_R.resize(n, n);
  Vector probe = x_star;
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    probe(i) = x_star(i) + h;
    const Vector rp = prox_grad_step(p, probe, gamma).r;
    probe(i) = x_star(i) - h;
    const Vector rm = prox_grad_step(p, probe, gamma).r;
    probe(i) = x_star(i);
    const Vector fwd = (rp - center.r) / h;
    const Vector bwd = (center.r - rm) / h;
    worst = std::max(worst, (fwd - bwd).norm() / (1.0 + fwd.norm() + bwd.norm()));
    rep.J_R.col(i) = (rp - rm) / (2.0 * h);
  }
  if (!rep.prox_single_valued || worst > 10.0 * h) {
    rep.warning = "finite-difference probes cross a nonsmoothness of the prox";
  }

  rep.Q_gamma = Matrix::Identity(n, n) - gamma * fd_hessian(p, x_star);
  rep.H_fbe = rep.Q_gamma * rep.J_R;
  const double hn = rep.H_fbe.norm();
  rep.symmetry_defect = hn > 0.0 ? (rep.H_fbe - rep.H_fbe.transpose()).norm() / hn : 0.0;
  const Matrix sym = 0.5 * (rep.H_fbe + rep.H_fbe.transpose());
  rep.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return rep;
}

std::vector<std::optional<double>> dennis_more_ratio(const std::vector<Vector>& rbar,
                                                     const std::vector<Vector>& directions,
                                                     const Matrix& J_R_star) {
  if (rbar.size() != directions.size()) throw std::invalid_argument("dennis_more_ratio: length mismatch");
  std::vector<std::optional<double>> out;
  out.reserve(rbar.size());
  for (std::size_t k = 0; k < rbar.size(); ++k) {
    const double dn = directions[k].norm();
    if (dn == 0.0) {
      out.emplace_back(std::nullopt);
      continue;
    }
    out.emplace_back((rbar[k] + J_R_star * directions[k]).norm() / dn);
  }
  return out;
}

std::string to_string(RateClass c) {
  switch (c) {
  case RateClass::sublinear: return "sublinear";
  case RateClass::linear: return "linear";
  case RateClass::superlinear: return "superlinear";
  }
  return "unknown";
}

RateReport classify_rate(const std::vector<double>& residual_norms, std::size_t window) {
  if (residual_norms.empty()) throw std::invalid_argument("classify_rate: empty sequence");
  if (window < 2) throw std::invalid_argument("classify_rate: window must be at least 2");
  const double cutoff = residual_norms.front() / 10.0;
  std::vector<double> tail;
  for (double e : residual_norms) {
    if (e <= cutoff) tail.push_back(e);
  }
  if (tail.size() < 10) throw std::invalid_argument("classify_rate: fewer than 10 entries below initial/10");

  RateReport rep;
  rep.window = window;
  for (std::size_t k = 0; k + 1 < tail.size(); ++k) {
    if (tail[k] == 0.0) break;
    rep.q_factors.push_back(tail[k + 1] / tail[k]);
  }
  const auto& q = rep.q_factors;
  if (q.size() < 2) throw std::invalid_argument("classify_rate: too few nonzero entries");
  const std::size_t w = std::min(window, q.size());
  const auto last = q.end() - static_cast<std::ptrdiff_t>(w);

  bool decreasing = true;
  for (auto it = last; it + 1 != q.end(); ++it) decreasing = decreasing && it[1] < it[0];
  const double mean = std::accumulate(last, q.end(), 0.0) / static_cast<double>(w);
  bool increasing = true;
  for (std::size_t k = 0; k + 1 < q.size(); ++k) increasing = increasing && q[k + 1] > q[k];

  if (decreasing && q.back() < 0.1) {
    rep.classification = RateClass::superlinear;
  } else if (mean >= 0.99 || (increasing && q.back() > 0.9)) {
    rep.classification = RateClass::sublinear;
  } else {
    rep.classification = RateClass::linear;
    rep.linear_factor = mean;
  }
  return rep;
}

} // namespace zerofpr
