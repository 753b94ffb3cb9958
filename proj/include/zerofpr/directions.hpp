#pragma once

#include "zerofpr/fbe.hpp"

#include <deque>
#include <memory>
#include <string>

namespace zerofpr {

/// Produces d = −H v from secant information (s, y).
///
/// Zero-length s pairs are dropped by every engine. After reset() the engine
/// behaves as H = I.
class DirectionEngine {
public:
  virtual ~DirectionEngine() = default;

  virtual Vector apply(const Vector& residual) const = 0;
  virtual void push(const Vector& s, const Vector& y) = 0;
  virtual void reset() = 0;
  virtual std::string name() const = 0;

  /// Engines that always return 0 let the solver skip the second T_γ
  /// evaluation entirely.
  virtual bool is_null() const { return false; }
  /// Requests the symmetrized residual r̄ + ∇f(x̄ − γr̄) − ∇f(x̄) as input,
  /// with y built from the same operator.
  virtual bool symmetrized() const { return false; }
};

/// Modified Broyden rank-one update with Powell's θ safeguard:
///   γ_k = ⟨Hy, s⟩/‖s‖²,  θ = 1 if |γ_k| ≥ θ̄ else (1 − sign(γ_k)θ̄)/(1 − γ_k)
///   H⁺  = H + (s − Hy)·sᵀH / ⟨s, (1/θ − 1)s + Hy⟩
/// with sign(0) = +1. Returns H unchanged for s = 0.
Matrix broyden_push(const Matrix& H, const Vector& s, const Vector& y, double theta_bar);

/// Powell's θ for the Broyden update above.
double powell_theta(const Matrix& H, const Vector& s, const Vector& y, double theta_bar);

/// Inverse BFGS update; returns H unchanged when ⟨s, y⟩ ≤ 0 or s = 0.
Matrix bfgs_push(const Matrix& H, const Vector& s, const Vector& y);

struct SecantPair {
  Vector s;
  Vector y;
  double rho = 0.0;  // 1/⟨s, y⟩
};

/// Two-loop recursion: returns −H v where H is the L-BFGS matrix built from
/// `memory` (oldest first) on top of H₀ = scaling·I.
Vector lbfgs_apply(const std::deque<SecantPair>& memory, const Vector& v, double scaling);

/// r̄ + ∇f(x̄ − γr̄) − ∇f(x̄) for a step evaluated at x̄ (step.x = x̄,
/// step.r = r̄). One extra gradient evaluation.
Vector symmetrized_bfgs_residual(const ProxGradStep& step, const Problem& p);

class NullEngine final : public DirectionEngine {
public:
  Vector apply(const Vector& residual) const override { return Vector::Zero(residual.size()); }
  void push(const Vector&, const Vector&) override {}
  void reset() override {}
  std::string name() const override { return "null"; }
  bool is_null() const override { return true; }
};

class BroydenEngine final : public DirectionEngine {
public:
  explicit BroydenEngine(double theta_bar = 1e-4);
  Vector apply(const Vector& residual) const override;
  void push(const Vector& s, const Vector& y) override;
  void reset() override { H_.resize(0, 0); }
  std::string name() const override { return "broyden"; }
  /// Empty until the first push.
  const Matrix& matrix() const { return H_; }

private:
  double theta_bar_;
  Matrix H_;
};

class BfgsEngine final : public DirectionEngine {
public:
  explicit BfgsEngine(bool symmetrized = false) : symmetrized_(symmetrized) {}
  Vector apply(const Vector& residual) const override;
  void push(const Vector& s, const Vector& y) override;
  void reset() override { H_.resize(0, 0); }
  std::string name() const override { return symmetrized_ ? "sbfgs" : "bfgs"; }
  bool symmetrized() const override { return symmetrized_; }
  const Matrix& matrix() const { return H_; }

private:
  bool symmetrized_;
  Matrix H_;
};

/// Keeps the last `memory` pairs; pairs with ⟨s,y⟩ ≤ 1e-12‖s‖‖y‖ are skipped.
/// H₀ = (⟨s,y⟩/⟨y,y⟩)·I from the newest pair, or I when empty.
class LbfgsEngine final : public DirectionEngine {
public:
  explicit LbfgsEngine(std::size_t memory = 10);
  Vector apply(const Vector& residual) const override;
  void push(const Vector& s, const Vector& y) override;
  void reset() override { pairs_.clear(); }
  std::string name() const override { return "lbfgs"; }
  const std::deque<SecantPair>& pairs() const { return pairs_; }
  double scaling() const;

private:
  std::size_t memory_;
  std::deque<SecantPair> pairs_;
};

/// "null", "broyden", "bfgs", "sbfgs", "lbfgs". Throws std::invalid_argument
/// for anything else.
std::unique_ptr<DirectionEngine> make_engine(const std::string& name, double theta_bar = 1e-4,
                                             std::size_t memory = 10);

} // namespace zerofpr
