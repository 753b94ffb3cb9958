#include "zerofpr/diagnostics.hpp"
#include "zerofpr/prox.hpp"
#include "zerofpr/random.hpp"
#include "zerofpr/testlib.hpp"

#include <doctest.h>
#include <oracles.hpp>

#include <cmath>

using namespace zerofpr;

namespace {

Problem scalar(double a, double c, std::shared_ptr<const NonsmoothOracle> g) {
  // f(x) = ½ax² + cx
  Matrix Q(1, 1);
  Q(0, 0) = a;
  Vector b(1);
  b(0) = -c;
  return make_problem(std::make_shared<Quadratic>(Q, b), std::move(g), 1, a);
}

Vector pt(double v) { return Vector::Constant(1, v); }

// Solution of a lasso instance at tight tolerance.
Vector solve_tight(const Problem& p, Index n) {
  SolverConfig cfg;
  cfg.tol = 1e-12;
  cfg.max_iters = 5000;
  BroydenEngine eng(1e-4);
  return zerofpr_solve(p, Vector::Zero(n), cfg, eng).solution;
}

} // namespace

TEST_CASE("fd step scales with the point") {
  CHECK(fd_step(Vector::Zero(3)) == doctest::Approx(std::cbrt(2.220446049250313e-16)));
  CHECK(fd_step(Vector::Constant(1, 3.0)) == doctest::Approx(4 * std::cbrt(2.220446049250313e-16)));
}

TEST_CASE("criticality threshold on the two-point example") {
  const AnalyticProblem ap = make_example_3_3();
  CHECK(estimate_criticality_threshold(ap.problem, pt(1.0), 4.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(estimate_criticality_threshold(ap.problem, pt(-1.0), 4.0) == doctest::Approx(1.0).epsilon(1e-6));
  // γ_max below the threshold: every γ passes.
  CHECK(estimate_criticality_threshold(ap.problem, pt(1.0), 0.5) == 0.5);
}

TEST_CASE("criticality threshold is zero away from stationary points") {
  const Problem p = scalar(1.0, 0.0, std::make_shared<ZeroProx>());
  // Only γ with γ|∇f| ≤ tol·(1 + |x|) pass.
  CHECK(estimate_criticality_threshold(p, pt(0.3), 0.9) <= 1e-10 * 1.3 / 0.3);
  CHECK(estimate_criticality_threshold(p, pt(0.0), 0.9) == 0.9);
}

TEST_CASE("criticality threshold against a gamma grid scan") {
  // f = ½x², C = {−1, 2}: x = 2 stays fixed while (1 − γ)·2 is closer to 2.
  const Problem p = scalar(1.0, 0.0, std::make_shared<FiniteSetIndicator>(std::vector<double>{-1.0, 2.0}));
  auto fixed = [](double gamma) {
    const double z = (1.0 - gamma) * 2.0;
    return std::abs(z - 2.0) < std::abs(z + 1.0);
  };
  double grid = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double gamma = 0.9 * i / 10000.0;
    if (!fixed(gamma)) break;
    grid = gamma;
  }
  const double est = estimate_criticality_threshold(p, pt(2.0), 0.9);
  CHECK(est >= grid);
  CHECK(est <= grid + 0.9 / 10000.0);

  // λ|·| with f = ½x² + x at 0: 0 ∈ 1 + [−λ, λ] iff λ ≥ 1.
  const Problem q1 = scalar(1.0, 1.0, std::make_shared<L1Prox>(1.5));
  CHECK(estimate_criticality_threshold(q1, pt(0.0), 0.9) == 0.9);
  const Problem q2 = scalar(1.0, 1.0, std::make_shared<L1Prox>(0.5));
  CHECK(estimate_criticality_threshold(q2, pt(0.0), 0.9) <= 1e-10 / 0.5);
}

TEST_CASE("fd gradient of the envelope on a quadratic") {
  const AnalyticProblem ap = make_quadratic(6, 10.0, 4);
  const auto& quad = dynamic_cast<const Quadratic&>(*ap.problem.smooth);
  const Matrix& Q = quad.hessian();
  Rng rng(3);
  const Vector x = rng.normal_vector(6);
  const double gamma = 0.4;
  const GradientCheck gc = fd_gradient_check_fbe(ap.problem, x, gamma);
  const Vector analytic = (Matrix::Identity(6, 6) - gamma * Q) * (Q * x - quad.linear());
  CHECK((gc.fd_gradient - analytic).lpNorm<Eigen::Infinity>() <= 1e-6 * (1 + analytic.lpNorm<Eigen::Infinity>()));
  CHECK(gc.max_rel_error <= 1e-6);
  CHECK(gc.prox_single_valued);

  const GradientCheck at_min = fd_gradient_check_fbe(ap.problem, *ap.known_minimizer, gamma);
  CHECK(at_min.fd_gradient.lpNorm<Eigen::Infinity>() <= 1e-8);
}

TEST_CASE("fd gradient of the envelope at a lasso solution") {
  const AnalyticProblem ap = make_lasso(30, 12, 0.2, 5);
  const double gamma = 0.5 / ap.known_L_f;
  const GradientCheck gc = fd_gradient_check_fbe(ap.problem, *ap.known_minimizer, gamma);
  CHECK(gc.max_rel_error <= 1e-4);
  CHECK(gc.prox_single_valued);
}

TEST_CASE("second-order report on a quadratic") {
  const AnalyticProblem ap = make_quadratic(5, 20.0, 2);
  const Matrix& Q = dynamic_cast<const Quadratic&>(*ap.problem.smooth).hessian();
  const double gamma = 0.6;
  const SecondOrderReport rep = second_order_report(ap.problem, *ap.known_minimizer, gamma);
  const Matrix H = (Matrix::Identity(5, 5) - gamma * Q) * Q;
  CHECK((rep.J_R - Q).norm() <= 1e-5);
  CHECK((rep.H_fbe - H).norm() <= 1e-5);
  CHECK(rep.symmetry_defect <= 1e-5);
  CHECK(rep.min_eigenvalue > 0.0);
  CHECK_FALSE(rep.warning);

  CHECK_THROWS_AS(second_order_report(ap.problem, Vector::Zero(5), gamma), std::invalid_argument);
}

TEST_CASE("second-order report at a lasso solution") {
  const AnalyticProblem ap = make_lasso(40, 20, 0.1, 3);
  const double gamma = 0.5 / ap.known_L_f;
  const Vector x = solve_tight(ap.problem, 20);
  const SecondOrderReport rep = second_order_report(ap.problem, x, gamma);
  CHECK(rep.prox_single_valued);
  CHECK(rep.symmetry_defect <= 1e-4);
  CHECK(rep.min_eigenvalue > 0.0);
}

TEST_CASE("second-order report on the two-point example") {
  const AnalyticProblem ap = make_example_3_3();
  const double gamma = 0.5;
  const SecondOrderReport rep = second_order_report(ap.problem, pt(-1.0), gamma);
  CHECK(rep.J_R(0, 0) == doctest::Approx(1.0 / gamma).epsilon(1e-6));
  CHECK(rep.Q_gamma(0, 0) == doctest::Approx(1.0 - gamma).epsilon(1e-6));
  CHECK(rep.H_fbe(0, 0) == doctest::Approx((1.0 - gamma) / gamma).epsilon(1e-6));
  CHECK(rep.min_eigenvalue > 0.0);
}

TEST_CASE("single-valuedness probe") {
  const AnalyticProblem ap = make_example_3_3();
  CHECK(prox_looks_single_valued(ap.problem, pt(1.0), 0.5));
  // (1 − γ)·0 sits on the tie between −1 and +1.
  CHECK_FALSE(prox_looks_single_valued(ap.problem, pt(0.0), 0.5));
}

TEST_CASE("dennis-more ratio trivial cases") {
  Rng rng(8);
  const Matrix J = Matrix::Identity(4, 4) * 2.0 + 0.1 * rng.normal_matrix(4, 4);
  std::vector<Vector> rbar, dirs;
  for (int i = 0; i < 3; ++i) {
    rbar.push_back(rng.normal_vector(4));
    dirs.push_back(-J.lu().solve(rbar.back()));
  }
  rbar.push_back(rng.normal_vector(4));
  dirs.push_back(Vector::Zero(4));
  const auto ratio = dennis_more_ratio(rbar, dirs, J);
  REQUIRE(ratio.size() == 4);
  for (int i = 0; i < 3; ++i) CHECK(*ratio[static_cast<std::size_t>(i)] <= 1e-12);
  CHECK_FALSE(ratio[3]);

  const std::vector<Vector> r1{Vector::Ones(3)};
  const std::vector<Vector> d1{-Vector::Ones(3)};
  CHECK(*dennis_more_ratio(r1, d1, Matrix::Identity(3, 3))[0] == 0.0);
  CHECK_THROWS(dennis_more_ratio(r1, {}, Matrix::Identity(3, 3)));
}

// Measured along Broyden runs on the quadratic suite with the analytic J_R = Q.
TEST_CASE("dennis-more ratio along Broyden runs") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const AnalyticProblem ap = make_quadratic(20, 100.0, seed);
    const Matrix& Q = dynamic_cast<const Quadratic&>(*ap.problem.smooth).hessian();
    SolverConfig cfg;
    cfg.tol = 1e-9;
    cfg.max_iters = 400;
    cfg.record_directions = true;
    BroydenEngine eng(1e-4);
    const RunTrace t = zerofpr_solve(ap.problem, Vector::Zero(20), cfg, eng);
    const auto ratio = dennis_more_ratio(t.rbar, t.directions, Q);
    REQUIRE(ratio.size() > 10);
    double first = 0.0, best = 1e300;
    for (const auto& v : ratio) {
      if (!v) continue;
      if (first == 0.0) first = *v;
      best = std::min(best, *v);
    }
    CAPTURE(seed);
    CHECK(best < 0.1 * first);
  }
}

TEST_CASE("dennis-more ratio below 1e-3 within 3n Broyden iterations" * doctest::may_fail()) {
  const AnalyticProblem ap = make_quadratic(20, 100.0, 1);
  const Matrix& Q = dynamic_cast<const Quadratic&>(*ap.problem.smooth).hessian();
  SolverConfig cfg;
  cfg.tol = 1e-9;
  cfg.max_iters = 60;
  cfg.record_directions = true;
  BroydenEngine eng(1e-4);
  const RunTrace t = zerofpr_solve(ap.problem, Vector::Zero(20), cfg, eng);
  double best = 1e300;
  for (const auto& v : dennis_more_ratio(t.rbar, t.directions, Q)) {
    if (v) best = std::min(best, *v);
  }
  CHECK(best <= 1e-3);
}

TEST_CASE("classify_rate on model sequences") {
  std::vector<double> geo, sup, sub;
  for (int k = 0; k < 30; ++k) geo.push_back(std::pow(2.0, -k));
  for (int k = 0; k < 6; ++k) sup.push_back(std::pow(2.0, -k * k));
  // 2^(−k²) only has a handful of representable terms; pad the front so the
  // tail holds 10 entries below initial/10.
  std::vector<double> sup_long;
  for (int k = 0; k < 6; ++k) sup_long.push_back(1.0 - 0.08 * k);
  for (int k = 0; k < 12; ++k) sup_long.push_back(0.05 * std::pow(2.0, -k * k));
  for (int k = 1; k < 2000; ++k) sub.push_back(1.0 / k);

  const RateReport lin = classify_rate(geo);
  CHECK(lin.classification == RateClass::linear);
  CHECK(lin.linear_factor == doctest::Approx(0.5));
  CHECK(lin.window == 3);

  CHECK(classify_rate(sup_long).classification == RateClass::superlinear);
  CHECK(classify_rate(sub).classification == RateClass::sublinear);
  CHECK_THROWS_AS(classify_rate(sup), std::invalid_argument);
  CHECK_THROWS_AS(classify_rate({}), std::invalid_argument);
  CHECK_THROWS_AS(classify_rate(geo, 1), std::invalid_argument);
  CHECK(to_string(RateClass::superlinear) == "superlinear");
}
