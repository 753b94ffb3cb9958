#pragma once

#include "zerofpr/types.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace zerofpr {

/// Monotone event counter. Relaxed atomics: concurrent runs sharing an oracle
/// still get consistent totals, but attributing counts to a run requires each
/// run to own its oracle (see OracleCounts snapshots in the solver).
class Counter {
public:
  Counter() = default;
  Counter(const Counter& other) : n_(other.get()) {}
  Counter& operator=(const Counter& other) {
    n_.store(other.get(), std::memory_order_relaxed);
    return *this;
  }

  void add(std::uint64_t k = 1) const { n_.fetch_add(k, std::memory_order_relaxed); }
  std::uint64_t get() const { return n_.load(std::memory_order_relaxed); }

private:
  mutable std::atomic<std::uint64_t> n_{0};
};

struct SmoothEval {
  double value = 0.0;
  Vector gradient;
};

/// f and ∇f. One call returns both.
class SmoothOracle {
public:
  virtual ~SmoothOracle() = default;

  /// Counted evaluation. Throws std::invalid_argument on a length mismatch.
  SmoothEval eval(const Vector& x) const;

  /// 0 means "any length".
  virtual Index dimension() const { return 0; }

  std::uint64_t eval_count() const { return evals_.get(); }
  /// Products with A and Aᵀ for oracles built from a matrix; zero otherwise.
  std::uint64_t matvec_a_count() const { return matvec_a_.get(); }
  std::uint64_t matvec_at_count() const { return matvec_at_.get(); }

protected:
  virtual SmoothEval do_eval(const Vector& x) const = 0;
  void count_matvecs(std::uint64_t with_a, std::uint64_t with_at) const {
    matvec_a_.add(with_a);
    matvec_at_.add(with_at);
  }

private:
  Counter evals_;
  Counter matvec_a_;
  Counter matvec_at_;
};

struct ProxResult {
  Vector z;
  ExtendedReal g_at_z;
};

/// g, a selection of prox_{γg}, and the prox-boundedness threshold γ_g.
class NonsmoothOracle {
public:
  virtual ~NonsmoothOracle() = default;

  /// Counted. Throws std::domain_error unless 0 < gamma < gamma_threshold().
  ProxResult prox(const Vector& x, double gamma) const;

  ExtendedReal value(const Vector& x) const;

  virtual ExtendedReal gamma_threshold() const { return ExtendedReal::infinity(); }
  virtual Index dimension() const { return 0; }
  virtual std::string name() const = 0;

  std::uint64_t prox_count() const { return proxes_.get(); }

protected:
  virtual ProxResult do_prox(const Vector& x, double gamma) const = 0;
  virtual ExtendedReal do_value(const Vector& x) const = 0;

private:
  Counter proxes_;
};

/// Snapshot of every counter attached to a problem.
struct OracleCounts {
  std::uint64_t smooth_evals = 0;
  std::uint64_t prox_evals = 0;
  std::uint64_t matvec_a = 0;
  std::uint64_t matvec_at = 0;

  std::uint64_t matvecs() const { return matvec_a + matvec_at; }
  OracleCounts operator-(const OracleCounts& o) const {
    return {smooth_evals - o.smooth_evals, prox_evals - o.prox_evals,
            matvec_a - o.matvec_a, matvec_at - o.matvec_at};
  }
};

/// minimize f(x) + g(x).
struct Problem {
  std::shared_ptr<const SmoothOracle> smooth;
  std::shared_ptr<const NonsmoothOracle> nonsmooth;
  Index dimension = 0;
  std::optional<double> lipschitz_estimate;

  OracleCounts counts() const;
  /// φ(x) = f(x) + g(x). Costs one smooth eval.
  ExtendedReal objective(const Vector& x) const;
};

/// Checks that both oracles accept `dimension` and that L (if any) is positive.
Problem make_problem(std::shared_ptr<const SmoothOracle> smooth,
                     std::shared_ptr<const NonsmoothOracle> nonsmooth, Index dimension,
                     std::optional<double> lipschitz_estimate = std::nullopt);

/// ½‖Ax − b‖². Two matvecs per evaluation (one with A, one with Aᵀ).
class LeastSquares final : public SmoothOracle {
public:
  LeastSquares(Matrix A, Vector b);
  Index dimension() const override { return A_.cols(); }
  const Matrix& matrix() const { return A_; }
  const Vector& rhs() const { return b_; }

private:
  SmoothEval do_eval(const Vector& x) const override;
  Matrix A_;
  Vector b_;
};

/// ½xᵀQx − bᵀx with symmetric Q.
class Quadratic final : public SmoothOracle {
public:
  Quadratic(Matrix Q, Vector b);
  Index dimension() const override { return Q_.cols(); }
  const Matrix& hessian() const { return Q_; }
  const Vector& linear() const { return b_; }

private:
  SmoothEval do_eval(const Vector& x) const override;
  Matrix Q_;
  Vector b_;
};

/// Adapter for ad-hoc smooth terms.
class FunctionSmooth final : public SmoothOracle {
public:
  using Fn = std::function<SmoothEval(const Vector&)>;
  explicit FunctionSmooth(Fn fn, Index dimension = 0)
      : fn_(std::move(fn)), dim_(dimension) {}
  Index dimension() const override { return dim_; }

private:
  SmoothEval do_eval(const Vector& x) const override { return fn_(x); }
  Fn fn_;
  Index dim_;
};

std::shared_ptr<LeastSquares> compose_least_squares(Matrix A, Vector b);

/// g^γ(x) = min_z g(z) + ‖z − x‖²/(2γ), evaluated at the oracle's prox
/// selection. Throws std::domain_error for γ outside (0, γ_g).
double moreau_envelope(const NonsmoothOracle& g, const Vector& x, double gamma);

} // namespace zerofpr
