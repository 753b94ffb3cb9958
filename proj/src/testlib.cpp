#include "zerofpr/testlib.hpp"

#include "zerofpr/prox.hpp"
#include "zerofpr/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace zerofpr {

AnalyticProblem make_quadratic(Index n, double condition, std::uint64_t seed) {
  if (n < 1 || !(condition >= 1.0)) throw std::invalid_argument("make_quadratic: need n >= 1, condition >= 1");
  Rng rng(seed);
  const Matrix G = rng.normal_matrix(n, n);
  const Matrix U = Eigen::HouseholderQR<Matrix>(G).householderQ();
  Vector eig(n);
  for (Index i = 0; i < n; ++i) {
    const double t = n == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    eig(i) = std::pow(condition, t - 1.0);
  }
  Matrix Q = U * eig.asDiagonal() * U.transpose();
  Q = (0.5 * (Q + Q.transpose())).eval();
  const Vector b = rng.normal_vector(n);
  const Vector x_star = Q.ldlt().solve(b);

  AnalyticProblem out;
  out.problem = make_problem(std::make_shared<Quadratic>(Q, b), std::make_shared<ZeroProx>(), n, 1.0);
  out.known_minimizer = x_star;
  out.known_min_value = -0.5 * b.dot(x_star);
  out.known_L_f = 1.0;
  std::ostringstream os;
  os << "quadratic n=" << n << " cond=" << condition << " seed=" << seed;
  out.description = os.str();
  return out;
}

AnalyticProblem make_lasso(Index m, Index n, double lambda, std::uint64_t seed) {
  if (m < 1 || n < 1 || !(lambda > 0.0)) throw std::invalid_argument("make_lasso: bad sizes or lambda");
  Rng rng(seed);
  const Index support = std::max<Index>(1, std::min(m, n) / 4);

  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  Vector x_star = Vector::Zero(n);
  for (Index k = 0; k < support; ++k) {
    const double sgn = rng.uniform() < 0.5 ? -1.0 : 1.0;
    x_star(idx[static_cast<std::size_t>(k)]) = sgn * (0.5 + std::abs(rng.normal()));
  }

  const Vector w = rng.normal_vector(m, 0.5);
  Matrix A(m, n);
  for (Index j = 0; j < n; ++j) {
    const double target = x_star(j) != 0.0 ? lambda * (x_star(j) > 0.0 ? 1.0 : -1.0)
                                           : lambda * rng.uniform(-0.8, 0.8);
    // Shift a Gaussian column along w so that a_jᵀw hits the target exactly.
    Vector a = rng.normal_vector(m, 1.0 / std::sqrt(static_cast<double>(m)));
    a += ((target - a.dot(w)) / w.squaredNorm()) * w;
    A.col(j) = a;
  }
  const Vector b = A * x_star + w;
  const double L = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);

  AnalyticProblem out;
  out.problem = make_problem(compose_least_squares(A, b), std::make_shared<L1Prox>(lambda), n, L * L);
  out.known_minimizer = x_star;
  out.known_min_value = 0.5 * w.squaredNorm() + lambda * x_star.lpNorm<1>();
  out.known_L_f = L * L;
  std::ostringstream os;
  os << "lasso m=" << m << " n=" << n << " lambda=" << lambda << " seed=" << seed;
  out.description = os.str();
  return out;
}

AnalyticProblem make_example_3_3() {
  AnalyticProblem out;
  out.problem = make_problem(std::make_shared<Quadratic>(Matrix::Identity(1, 1), Vector::Zero(1)),
                             std::make_shared<FiniteSetIndicator>(std::vector<double>{-1.0, 1.0}), 1, 1.0);
  out.known_minimizer = Vector::Constant(1, 1.0);
  out.known_min_value = 0.5;
  out.known_L_f = 1.0;
  out.description = "f = x^2/2, g = indicator{-1,+1}";
  return out;
}

AnalyticProblem make_l1_plus_power() {
  AnalyticProblem out;
  out.problem = make_problem(std::make_shared<Quadratic>(Matrix::Identity(1, 1), Vector::Zero(1)),
                             std::make_shared<PowerFiveThirdsProx>(1.0), 1, 1.0);
  out.known_minimizer = Vector::Constant(1, -125.0 / 27.0);
  out.known_min_value = -std::pow(5.0 / 3.0, 5) / 6.0;
  out.known_L_f = 1.0;
  out.description = "f = x^2/2, g = x^(5/3)";
  return out;
}

double sampled_lipschitz(const Problem& p, int samples, std::uint64_t seed, double scale) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vector x = rng.normal_vector(p.dimension, scale);
    const Vector y = rng.normal_vector(p.dimension, scale);
    const double q = (p.smooth->eval(x).gradient - p.smooth->eval(y).gradient).norm() / (x - y).norm();
    worst = std::max(worst, q);
  }
  return worst;
}

namespace {

class Auditor {
public:
  Auditor(AuditReport& rep, double rel) : rep_(rep), rel_(rel) {}

  void check(int k, const char* name, double lhs, double rhs) {
    if (std::isnan(lhs) || std::isnan(rhs)) return;
    ++rep_.checks;
    const double scale = 1.0 + std::abs(rhs);
    rep_.worst_slack = std::max(rep_.worst_slack, (lhs - rhs) / scale);
    const double excess = lhs - rhs - rel_ * scale;
    if (excess > 0.0) rep_.failures.push_back({k, name, excess});
  }

private:
  AuditReport& rep_;
  double rel_;
};

} // namespace

AuditReport audit_inequalities(const RunTrace& trace, double L_f, double rel_slack) {
  AuditReport rep;
  Auditor a(rep, rel_slack);
  const auto& it = trace.iters;

  for (std::size_t i = 0; i < it.size(); ++i) {
    const IterationRecord& r = it[i];
    const double gamma = r.gamma;
    const double dist2 = gamma * gamma * r.res_norm * r.res_norm;
    a.check(r.k, "fb_decrease", r.phi_xbar, r.fbe - (1.0 - gamma * L_f) / (2.0 * gamma) * dist2);
    a.check(r.k, "fbe_below_phi_at_xbar", r.fbe_xbar, r.phi_xbar);
    if (!trace.merit_linesearch) continue;

    a.check(r.k, "fbe_below_phibar", r.fbe, r.phibar);
    if (std::isnan(r.tau)) continue;
    const double decrease = r.sigma * r.res_norm * r.res_norm;
    a.check(r.k, "linesearch", r.fbe_next, r.phibar - decrease);
    if (i + 1 < it.size() && !it[i + 1].gamma_reset) {
      a.check(r.k, "phibar_decrease", it[i + 1].phibar, r.phibar - r.p * decrease);
    }
  }

  if (trace.merit_linesearch && trace.p_min > 0.0) {
    // Segments of constant γ; each restarts Φ̄ at φ_γ of its first point.
    std::size_t start = 0;
    while (start < it.size()) {
      std::size_t end = start + 1;
      while (end < it.size() && !it[end].gamma_reset) ++end;
      double sum = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        if (!std::isnan(it[i].tau)) sum += it[i].res_norm * it[i].res_norm;
      }
      const IterationRecord& first = it[start];
      const double bound = (first.phibar - it[end - 1].fbe) / (first.sigma * trace.p_min);
      rep.residual_sum += sum;
      rep.residual_bound += bound;
      a.check(first.k, "residual_square_sum", sum * first.sigma * trace.p_min,
              first.phibar - it[end - 1].fbe);
      start = end;
    }
  }
  return rep;
}

} // namespace zerofpr
