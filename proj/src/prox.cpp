#include "zerofpr/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace zerofpr {

namespace {

constexpr double kMembershipTol = 1e-9;

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double l_half_scalar(double x, double lambda, double gamma) {
  const double a = std::abs(x);
  if (a == 0.0) return 0.0;
  // Stationary point of λ√z + (z − a)²/(2γ) on z > 0, written as the
  // half-thresholding cosine formula with parameter 2γλ.
  const double arg = 0.25 * gamma * lambda * std::pow(a / 3.0, -1.5);
  if (!(arg <= 1.0)) return 0.0;
  const double p = std::acos(arg);
  const double z = (2.0 * x / 3.0) * (1.0 + std::cos(2.0 * std::numbers::pi / 3.0 - 2.0 * p / 3.0));
  const double obj_z = lambda * std::sqrt(std::abs(z)) + (z - x) * (z - x) / (2.0 * gamma);
  const double obj_0 = x * x / (2.0 * gamma);
  return obj_z < obj_0 ? z : 0.0;
}

double signed_power_five_thirds(double z) {
  return std::copysign(std::pow(std::abs(z), 5.0 / 3.0), z);
}

// Real roots of u³ + a u² + b u + c, polished with Newton.
std::vector<double> real_cubic_roots(double a, double b, double c) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  std::vector<double> ts;
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    ts.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s));
  } else if (p == 0.0) {
    ts.push_back(0.0);
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) ts.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
  }
  std::vector<double> roots;
  for (double t : ts) {
    double u = t - a / 3.0;
    for (int it = 0; it < 3; ++it) {
      const double f = ((u + a) * u + b) * u + c;
      const double df = (3.0 * u + 2.0 * a) * u + b;
      if (df == 0.0) break;
      u -= f / df;
    }
    roots.push_back(u);
  }
  return roots;
}

double power_scalar(double x, double coef, double gamma) {
  // z = u³ with u³ + (5γc/3)u² − x = 0 at every nonzero stationary point.
  auto obj = [&](double z) { return coef * signed_power_five_thirds(z) + (z - x) * (z - x) / (2.0 * gamma); };
  double best = 0.0;
  double best_obj = obj(0.0);
  for (double u : real_cubic_roots(5.0 * gamma * coef / 3.0, 0.0, -x)) {
    const double z = u * u * u;
    const double o = obj(z);
    if (o < best_obj || (o == best_obj && std::abs(z) < std::abs(best))) {
      best = z;
      best_obj = o;
    }
  }
  return best;
}

} // namespace

Vector prox_l1(const Vector& x, double lambda, double gamma) {
  const double t = lambda * gamma;
  return x.unaryExpr([t](double v) { return soft_threshold(v, t); });
}

Vector prox_l_half(const Vector& x, double lambda, double gamma) {
  return x.unaryExpr([=](double v) { return l_half_scalar(v, lambda, gamma); });
}

Vector prox_l0(const Vector& x, double lambda, double gamma) {
  const double thr = std::sqrt(2.0 * gamma * lambda);
  return x.unaryExpr([thr](double v) { return std::abs(v) <= thr ? 0.0 : v; });
}

Vector prox_power_five_thirds(const Vector& x, double coefficient, double gamma) {
  return x.unaryExpr([=](double v) { return power_scalar(v, coefficient, gamma); });
}

Vector project_sphere(const Vector& d) {
  const double nrm = d.norm();
  if (nrm == 0.0) {
    Vector e = Vector::Zero(d.size());
    if (d.size() > 0) e(0) = 1.0;
    return e;
  }
  return d / nrm;
}

Vector project_box_l0(const Vector& c, Index N, double T) {
  if (N < 0 || N > c.size()) throw std::invalid_argument("project_box_l0: N out of range");
  std::vector<Index> order(static_cast<std::size_t>(c.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return std::abs(c(i)) > std::abs(c(j)); });
  Vector out = Vector::Zero(c.size());
  for (Index k = 0; k < N; ++k) {
    const Index i = order[static_cast<std::size_t>(k)];
    out(i) = std::clamp(c(i), -T, T);
  }
  return out;
}

Matrix project_rank(const Matrix& X, Index r) {
  if (r < 0 || r > std::min(X.rows(), X.cols())) {
    throw std::invalid_argument("project_rank: r out of range");
  }
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
         svd.matrixV().leftCols(r).transpose();
}

// --- oracles -------------------------------------------------------------

L1Prox::L1Prox(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("L1Prox: lambda must be nonnegative");
}
ProxResult L1Prox::do_prox(const Vector& x, double gamma) const {
  Vector z = prox_l1(x, lambda_, gamma);
  ExtendedReal gz = lambda_ * z.lpNorm<1>();
  return {std::move(z), gz};
}
ExtendedReal L1Prox::do_value(const Vector& x) const { return lambda_ * x.lpNorm<1>(); }

LHalfProx::LHalfProx(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("LHalfProx: lambda must be nonnegative");
}
ProxResult LHalfProx::do_prox(const Vector& x, double gamma) const {
  Vector z = lambda_ == 0.0 ? x : prox_l_half(x, lambda_, gamma);
  ExtendedReal gz = do_value(z);
  return {std::move(z), gz};
}
ExtendedReal LHalfProx::do_value(const Vector& x) const {
  return lambda_ * x.cwiseAbs().cwiseSqrt().sum();
}

L0Prox::L0Prox(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("L0Prox: lambda must be nonnegative");
}
ProxResult L0Prox::do_prox(const Vector& x, double gamma) const {
  Vector z = prox_l0(x, lambda_, gamma);
  ExtendedReal gz = do_value(z);
  return {std::move(z), gz};
}
ExtendedReal L0Prox::do_value(const Vector& x) const {
  return lambda_ * static_cast<double>((x.array() != 0.0).count());
}

PowerFiveThirdsProx::PowerFiveThirdsProx(double coefficient) : coefficient_(coefficient) {
  if (!(coefficient > 0.0)) throw std::invalid_argument("PowerFiveThirdsProx: coefficient must be positive");
}
ProxResult PowerFiveThirdsProx::do_prox(const Vector& x, double gamma) const {
  Vector z = prox_power_five_thirds(x, coefficient_, gamma);
  ExtendedReal gz = do_value(z);
  return {std::move(z), gz};
}
ExtendedReal PowerFiveThirdsProx::do_value(const Vector& x) const {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += signed_power_five_thirds(x(i));
  return coefficient_ * s;
}

FiniteSetIndicator::FiniteSetIndicator(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("FiniteSetIndicator: empty set");
}
ProxResult FiniteSetIndicator::do_prox(const Vector& x, double) const {
  Vector z(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    double best = points_.front();
    for (double p : points_) {
      if (std::abs(p - x(i)) < std::abs(best - x(i))) best = p;
    }
    z(i) = best;
  }
  return {std::move(z), 0.0};
}
ExtendedReal FiniteSetIndicator::do_value(const Vector& x) const {
  for (Index i = 0; i < x.size(); ++i) {
    const bool member = std::any_of(points_.begin(), points_.end(), [&](double p) {
      return std::abs(p - x(i)) <= 1e-12 * (1.0 + std::abs(p));
    });
    if (!member) return ExtendedReal::infinity();
  }
  return 0.0;
}

SphereIndicator::SphereIndicator(Index n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("SphereIndicator: n must be positive");
  at_zero_ = project_sphere(Vector::Zero(n));
}
SphereIndicator::SphereIndicator(Index n, Vector at_zero) : n_(n), at_zero_(std::move(at_zero)) {
  if (n <= 0) throw std::invalid_argument("SphereIndicator: n must be positive");
  if (at_zero_.size() != n || std::abs(at_zero_.norm() - 1.0) > kMembershipTol) {
    throw std::invalid_argument("SphereIndicator: at_zero must be a unit vector of length n");
  }
}
ProxResult SphereIndicator::do_prox(const Vector& x, double) const {
  if (x.norm() == 0.0) return {at_zero_, 0.0};
  return {project_sphere(x), 0.0};
}
ExtendedReal SphereIndicator::do_value(const Vector& x) const {
  return std::abs(x.norm() - 1.0) <= kMembershipTol ? ExtendedReal(0.0) : ExtendedReal::infinity();
}

BoxL0Indicator::BoxL0Indicator(Index k, Index N, double T) : k_(k), N_(N), T_(T) {
  if (k <= 0 || N < 0 || N > k || !(T > 0.0)) throw std::invalid_argument("BoxL0Indicator: bad parameters");
}
ProxResult BoxL0Indicator::do_prox(const Vector& x, double) const { return {project_box_l0(x, N_, T_), 0.0}; }
ExtendedReal BoxL0Indicator::do_value(const Vector& x) const {
  const bool ok = (x.array() != 0.0).count() <= N_ && x.cwiseAbs().maxCoeff() <= T_ * (1.0 + 1e-12);
  return ok ? ExtendedReal(0.0) : ExtendedReal::infinity();
}

RankIndicator::RankIndicator(Index rows, Index cols, Index r) : rows_(rows), cols_(cols), r_(r) {
  if (rows <= 0 || cols <= 0 || r < 0 || r > std::min(rows, cols)) {
    throw std::invalid_argument("RankIndicator: bad parameters");
  }
}
ProxResult RankIndicator::do_prox(const Vector& x, double) const {
  const Matrix P = project_rank(x.reshaped(rows_, cols_), r_);
  return {P.reshaped(), 0.0};
}
ExtendedReal RankIndicator::do_value(const Vector& x) const {
  if (r_ == std::min(rows_, cols_)) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(x.reshaped(rows_, cols_));
  const Vector& s = svd.singularValues();
  return s(r_) <= kMembershipTol * std::max(1.0, s(0)) ? ExtendedReal(0.0) : ExtendedReal::infinity();
}

// --- catalog -------------------------------------------------------------

ProxCatalogEntry zero_entry() { return {"zero", std::make_shared<ZeroProx>(), true, true}; }
ProxCatalogEntry l1_entry(double lambda) { return {"l1", std::make_shared<L1Prox>(lambda), true, true}; }
ProxCatalogEntry l_half_entry(double lambda) {
  return {"l_half", std::make_shared<LHalfProx>(lambda), true, false};
}
ProxCatalogEntry l0_entry(double lambda) { return {"l0", std::make_shared<L0Prox>(lambda), true, false}; }
ProxCatalogEntry sphere_entry(Index n) { return {"sphere", std::make_shared<SphereIndicator>(n), false, false}; }
ProxCatalogEntry sphere_entry(Index n, Vector at_zero) {
  return {"sphere", std::make_shared<SphereIndicator>(n, std::move(at_zero)), false, false};
}
ProxCatalogEntry box_l0_entry(Index k, Index N, double T) {
  return {"box_l0", std::make_shared<BoxL0Indicator>(k, N, T), false, false};
}
ProxCatalogEntry rank_entry(Index rows, Index cols, Index r) {
  return {"rank", std::make_shared<RankIndicator>(rows, cols, r), false, false};
}

std::vector<ProxCatalogEntry> separable_catalog(double lambda) {
  return {zero_entry(),
          l1_entry(lambda),
          l_half_entry(lambda),
          l0_entry(lambda),
          {"power_5_3", std::make_shared<PowerFiveThirdsProx>(lambda), true, false},
          {"pm_one", std::make_shared<FiniteSetIndicator>(std::vector<double>{-1.0, 1.0}), true, false}};
}

ProductProx::ProductProx(std::vector<ProductBlock> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("ProductProx: no blocks");
  std::vector<std::size_t> order(blocks_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return blocks_[a].range.offset < blocks_[b].range.offset; });
  Index next = 0;
  for (std::size_t i : order) {
    const auto& blk = blocks_[i];
    if (!blk.entry.oracle) throw std::invalid_argument("ProductProx: null oracle");
    if (blk.range.size <= 0) throw std::invalid_argument("ProductProx: empty block");
    if (blk.range.offset != next) {
      throw std::invalid_argument(blk.range.offset < next ? "ProductProx: overlapping blocks"
                                                          : "ProductProx: gap between blocks");
    }
    const Index d = blk.entry.oracle->dimension();
    if (d != 0 && d != blk.range.size) throw std::invalid_argument("ProductProx: block size mismatch");
    next += blk.range.size;
    threshold_ = std::min(threshold_, blk.entry.oracle->gamma_threshold());
  }
  n_ = next;
}

ProxResult ProductProx::do_prox(const Vector& x, double gamma) const {
  Vector z(x.size());
  double total = 0.0;
  bool finite = true;
  for (const auto& blk : blocks_) {
    ProxResult part = blk.entry.oracle->prox(x.segment(blk.range.offset, blk.range.size), gamma);
    z.segment(blk.range.offset, blk.range.size) = part.z;
    if (part.g_at_z.is_finite()) total += part.g_at_z.value();
    else finite = false;
  }
  return {std::move(z), finite ? ExtendedReal(total) : ExtendedReal::infinity()};
}

ExtendedReal ProductProx::do_value(const Vector& x) const {
  double total = 0.0;
  for (const auto& blk : blocks_) {
    const ExtendedReal v = blk.entry.oracle->value(x.segment(blk.range.offset, blk.range.size));
    if (!v.is_finite()) return v;
    total += v.value();
  }
  return total;
}

std::shared_ptr<ProductProx> prox_product(std::vector<ProductBlock> blocks) {
  return std::make_shared<ProductProx>(std::move(blocks));
}

} // namespace zerofpr
