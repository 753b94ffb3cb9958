#include "zerofpr/problem.hpp"

#include <cmath>
#include <sstream>

namespace zerofpr {

namespace {

void check_length(Index expected, Index got, const char* who) {
  if (expected != 0 && expected != got) {
    std::ostringstream os;
    os << who << ": expected length " << expected << ", got " << got;
    throw std::invalid_argument(os.str());
  }
}

} // namespace

SmoothEval SmoothOracle::eval(const Vector& x) const {
  check_length(dimension(), x.size(), "SmoothOracle::eval");
  evals_.add();
  SmoothEval out = do_eval(x);
  if (out.gradient.size() != x.size()) {
    throw std::logic_error("SmoothOracle::eval: gradient length differs from input");
  }
  return out;
}

ProxResult NonsmoothOracle::prox(const Vector& x, double gamma) const {
  if (!(gamma > 0.0) || !(ExtendedReal(gamma) < gamma_threshold())) {
    std::ostringstream os;
    os << name() << ": prox step " << gamma << " outside (0, gamma_g)";
    throw std::domain_error(os.str());
  }
  check_length(dimension(), x.size(), "NonsmoothOracle::prox");
  proxes_.add();
  return do_prox(x, gamma);
}

ExtendedReal NonsmoothOracle::value(const Vector& x) const {
  check_length(dimension(), x.size(), "NonsmoothOracle::value");
  return do_value(x);
}

OracleCounts Problem::counts() const {
  return {smooth->eval_count(), nonsmooth->prox_count(), smooth->matvec_a_count(),
          smooth->matvec_at_count()};
}

ExtendedReal Problem::objective(const Vector& x) const {
  const ExtendedReal gx = nonsmooth->value(x);
  if (!gx.is_finite()) return gx;
  return ExtendedReal(smooth->eval(x).value + gx.value());
}

Problem make_problem(std::shared_ptr<const SmoothOracle> smooth,
                     std::shared_ptr<const NonsmoothOracle> nonsmooth, Index dimension,
                     std::optional<double> lipschitz_estimate) {
  if (!smooth || !nonsmooth) throw std::invalid_argument("make_problem: null oracle");
  if (dimension <= 0) throw std::invalid_argument("make_problem: dimension must be positive");
  check_length(smooth->dimension(), dimension, "make_problem(smooth)");
  check_length(nonsmooth->dimension(), dimension, "make_problem(nonsmooth)");
  if (lipschitz_estimate && !(*lipschitz_estimate > 0.0)) {
    throw std::invalid_argument("make_problem: Lipschitz estimate must be positive");
  }
  return Problem{std::move(smooth), std::move(nonsmooth), dimension, lipschitz_estimate};
}

LeastSquares::LeastSquares(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() == 0 || A_.cols() == 0) throw std::invalid_argument("LeastSquares: empty A");
  if (A_.rows() != b_.size()) throw std::invalid_argument("LeastSquares: rows(A) != len(b)");
}

SmoothEval LeastSquares::do_eval(const Vector& x) const {
  Vector res = A_ * x - b_;
  SmoothEval out{0.5 * res.squaredNorm(), A_.transpose() * res};
  count_matvecs(1, 1);
  return out;
}

Quadratic::Quadratic(Matrix Q, Vector b) : Q_(std::move(Q)), b_(std::move(b)) {
  if (Q_.rows() != Q_.cols() || Q_.rows() != b_.size() || Q_.rows() == 0) {
    throw std::invalid_argument("Quadratic: Q must be square and match b");
  }
}

SmoothEval Quadratic::do_eval(const Vector& x) const {
  Vector Qx = Q_ * x;
  return {0.5 * x.dot(Qx) - b_.dot(x), Qx - b_};
}

std::shared_ptr<LeastSquares> compose_least_squares(Matrix A, Vector b) {
  return std::make_shared<LeastSquares>(std::move(A), std::move(b));
}

double moreau_envelope(const NonsmoothOracle& g, const Vector& x, double gamma) {
  ProxResult p = g.prox(x, gamma);
  if (!p.g_at_z.is_finite()) throw std::runtime_error("moreau_envelope: prox returned g = +inf");
  return p.g_at_z.value() + (p.z - x).squaredNorm() / (2.0 * gamma);
}

} // namespace zerofpr
