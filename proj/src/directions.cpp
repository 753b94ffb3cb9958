#include "zerofpr/directions.hpp"

#include <cmath>

namespace zerofpr {

namespace {

Matrix identity_if_empty(const Matrix& H, Index n) {
  return H.size() == 0 ? Matrix::Identity(n, n) : H;
}

} // namespace

double powell_theta(const Matrix& H, const Vector& s, const Vector& y, double theta_bar) {
  const double gk = (H * y).dot(s) / s.squaredNorm();
  if (std::abs(gk) >= theta_bar) return 1.0;
  const double sign = gk >= 0.0 ? 1.0 : -1.0;
  return (1.0 - sign * theta_bar) / (1.0 - gk);
}

Matrix broyden_push(const Matrix& H, const Vector& s, const Vector& y, double theta_bar) {
  if (s.squaredNorm() == 0.0) return H;
  const double theta = powell_theta(H, s, y, theta_bar);
  const Vector Hy = H * y;
  const double denom = (1.0 / theta - 1.0) * s.squaredNorm() + s.dot(Hy);
  const Eigen::RowVectorXd sTH = s.transpose() * H;
  return H + (s - Hy) * sTH / denom;
}

Matrix bfgs_push(const Matrix& H, const Vector& s, const Vector& y) {
  const double sy = s.dot(y);
  if (s.squaredNorm() == 0.0 || !(sy > 0.0)) return H;
  const double rho = 1.0 / sy;
  // (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ, expanded to avoid forming n×n factors.
  const Vector Hy = H * y;
  const Eigen::RowVectorXd yTH = y.transpose() * H;
  const double yHy = y.dot(Hy);
  Matrix out = H;
  out.noalias() -= rho * s * yTH;
  out.noalias() -= rho * Hy * s.transpose();
  out.noalias() += (rho * rho * yHy + rho) * s * s.transpose();
  return out;
}

Vector lbfgs_apply(const std::deque<SecantPair>& memory, const Vector& v, double scaling) {
  Vector q = v;
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * memory[i].s.dot(q);
    q -= alpha[i] * memory[i].y;
  }
  q *= scaling;
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * memory[i].y.dot(q);
    q += (alpha[i] - beta) * memory[i].s;
  }
  return -q;
}

Vector symmetrized_bfgs_residual(const ProxGradStep& step, const Problem& p) {
  if (step.r.squaredNorm() == 0.0) return step.r;
  const Vector shifted = step.x - step.gamma * step.r;
  return step.r + p.smooth->eval(shifted).gradient - step.grad_f_x;
}

BroydenEngine::BroydenEngine(double theta_bar) : theta_bar_(theta_bar) {
  if (!(theta_bar > 0.0 && theta_bar < 1.0)) throw std::invalid_argument("BroydenEngine: theta_bar in (0,1)");
}

Vector BroydenEngine::apply(const Vector& residual) const {
  if (H_.size() == 0) return -residual;
  return -(H_ * residual);
}

void BroydenEngine::push(const Vector& s, const Vector& y) {
  if (s.squaredNorm() == 0.0) return;
  H_ = broyden_push(identity_if_empty(H_, s.size()), s, y, theta_bar_);
}

Vector BfgsEngine::apply(const Vector& residual) const {
  if (H_.size() == 0) return -residual;
  return -(H_ * residual);
}

void BfgsEngine::push(const Vector& s, const Vector& y) {
  if (s.squaredNorm() == 0.0 || !(s.dot(y) > 0.0)) return;
  H_ = bfgs_push(identity_if_empty(H_, s.size()), s, y);
}

LbfgsEngine::LbfgsEngine(std::size_t memory) : memory_(memory) {
  if (memory == 0) throw std::invalid_argument("LbfgsEngine: memory must be positive");
}

double LbfgsEngine::scaling() const {
  if (pairs_.empty()) return 1.0;
  const auto& last = pairs_.back();
  return last.s.dot(last.y) / last.y.squaredNorm();
}

Vector LbfgsEngine::apply(const Vector& residual) const {
  return lbfgs_apply(pairs_, residual, scaling());
}

void LbfgsEngine::push(const Vector& s, const Vector& y) {
  const double sy = s.dot(y);
  if (s.squaredNorm() == 0.0 || !(sy > 1e-12 * s.norm() * y.norm())) return;
  if (pairs_.size() == memory_) pairs_.pop_front();
  pairs_.push_back({s, y, 1.0 / sy});
}

std::unique_ptr<DirectionEngine> make_engine(const std::string& name, double theta_bar,
                                             std::size_t memory) {
  if (name == "null") return std::make_unique<NullEngine>();
  if (name == "broyden") return std::make_unique<BroydenEngine>(theta_bar);
  if (name == "bfgs") return std::make_unique<BfgsEngine>(false);
  if (name == "sbfgs") return std::make_unique<BfgsEngine>(true);
  if (name == "lbfgs") return std::make_unique<LbfgsEngine>(memory);
  throw std::invalid_argument("make_engine: unknown direction engine '" + name + "'");
}

} // namespace zerofpr
