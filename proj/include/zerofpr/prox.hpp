#pragma once

#include "zerofpr/problem.hpp"

#include <memory>
#include <string>
#include <vector>

namespace zerofpr {

// Closed-form proximal maps. Where the prox is set-valued the selection rule
// is stated next to the function and is the same one the oracles below use.

/// Soft threshold at λγ.
Vector prox_l1(const Vector& x, double lambda, double gamma);

/// prox of λ·Σ|xᵢ|^½. Per coordinate, the half-thresholding candidate is
/// compared against 0 on the subproblem objective; ties go to 0.
Vector prox_l_half(const Vector& x, double lambda, double gamma);

/// Hard threshold: 0 where |xᵢ| ≤ √(2γλ) (ties go to 0), xᵢ otherwise.
Vector prox_l0(const Vector& x, double lambda, double gamma);

/// prox of c·Σ sign(xᵢ)|xᵢ|^{5/3}. Nonconvex, unbounded below, γ_g = +∞.
Vector prox_power_five_thirds(const Vector& x, double coefficient, double gamma);

/// d/‖d‖; the zero vector maps to e₁.
Vector project_sphere(const Vector& d);

/// Keeps the N largest-magnitude entries clipped to [−T, T], zeroes the rest.
/// Equal magnitudes are ranked by lower index first.
Vector project_box_l0(const Vector& c, Index N, double T);

/// Best rank-r approximation U_r Σ_r V_rᵀ from a thin SVD.
Matrix project_rank(const Matrix& X, Index r);

/// g ≡ 0.
class ZeroProx final : public NonsmoothOracle {
public:
  std::string name() const override { return "zero"; }

private:
  ProxResult do_prox(const Vector& x, double) const override { return {x, 0.0}; }
  ExtendedReal do_value(const Vector&) const override { return 0.0; }
};

/// λ‖x‖₁.
class L1Prox final : public NonsmoothOracle {
public:
  explicit L1Prox(double lambda);
  std::string name() const override { return "l1"; }
  double lambda() const { return lambda_; }

private:
  ProxResult do_prox(const Vector& x, double gamma) const override;
  ExtendedReal do_value(const Vector& x) const override;
  double lambda_;
};

/// λ‖x‖_{1/2}^{1/2} = λ·Σ|xᵢ|^½.
class LHalfProx final : public NonsmoothOracle {
public:
  explicit LHalfProx(double lambda);
  std::string name() const override { return "l_half"; }

private:
  ProxResult do_prox(const Vector& x, double gamma) const override;
  ExtendedReal do_value(const Vector& x) const override;
  double lambda_;
};

/// λ‖x‖₀.
class L0Prox final : public NonsmoothOracle {
public:
  explicit L0Prox(double lambda);
  std::string name() const override { return "l0"; }

private:
  ProxResult do_prox(const Vector& x, double gamma) const override;
  ExtendedReal do_value(const Vector& x) const override;
  double lambda_;
};

/// c·Σ sign(xᵢ)|xᵢ|^{5/3}.
class PowerFiveThirdsProx final : public NonsmoothOracle {
public:
  explicit PowerFiveThirdsProx(double coefficient = 1.0);
  std::string name() const override { return "power_5_3"; }

private:
  ProxResult do_prox(const Vector& x, double gamma) const override;
  ExtendedReal do_value(const Vector& x) const override;
  double coefficient_;
};

/// Componentwise indicator of a finite set of reals. Projection picks the
/// nearest point; equidistant points resolve to the one listed first.
class FiniteSetIndicator final : public NonsmoothOracle {
public:
  explicit FiniteSetIndicator(std::vector<double> points);
  std::string name() const override { return "finite_set"; }

private:
  ProxResult do_prox(const Vector& x, double gamma) const override;
  ExtendedReal do_value(const Vector& x) const override;
  std::vector<double> points_;
};

/// Indicator of the unit sphere in R^n.
class SphereIndicator final : public NonsmoothOracle {
public:
  explicit SphereIndicator(Index n);
  /// `at_zero` is the point returned when projecting 0 (default e₁).
  SphereIndicator(Index n, Vector at_zero);
  std::string name() const override { return "sphere"; }
  Index dimension() const override { return n_; }

private:
  ProxResult do_prox(const Vector& x, double gamma) const override;
  ExtendedReal do_value(const Vector& x) const override;
  Index n_;
  Vector at_zero_;
};

/// Indicator of {c ∈ R^k : ‖c‖₀ ≤ N, ‖c‖∞ ≤ T}.
class BoxL0Indicator final : public NonsmoothOracle {
public:
  BoxL0Indicator(Index k, Index N, double T);
  std::string name() const override { return "box_l0"; }
  Index dimension() const override { return k_; }

private:
  ProxResult do_prox(const Vector& x, double gamma) const override;
  ExtendedReal do_value(const Vector& x) const override;
  Index k_;
  Index N_;
  double T_;
};

/// Indicator of rows×cols matrices of rank ≤ r, acting on the column-major
/// vectorization.
class RankIndicator final : public NonsmoothOracle {
public:
  RankIndicator(Index rows, Index cols, Index r);
  std::string name() const override { return "rank"; }
  Index dimension() const override { return rows_ * cols_; }

private:
  ProxResult do_prox(const Vector& x, double gamma) const override;
  ExtendedReal do_value(const Vector& x) const override;
  Index rows_;
  Index cols_;
  Index r_;
};

struct ProxCatalogEntry {
  std::string name;
  std::shared_ptr<const NonsmoothOracle> oracle;
  bool separable = false;
  bool convex = false;
  ExtendedReal gamma_threshold = ExtendedReal::infinity();
};

/// The separable entries (zero, ℓ1, ℓ½, ℓ0, power 5/3, {±1}) at weight λ.
std::vector<ProxCatalogEntry> separable_catalog(double lambda);

ProxCatalogEntry zero_entry();
ProxCatalogEntry l1_entry(double lambda);
ProxCatalogEntry l_half_entry(double lambda);
ProxCatalogEntry l0_entry(double lambda);
ProxCatalogEntry sphere_entry(Index n);
ProxCatalogEntry sphere_entry(Index n, Vector at_zero);
ProxCatalogEntry box_l0_entry(Index k, Index N, double T);
ProxCatalogEntry rank_entry(Index rows, Index cols, Index r);

struct BlockRange {
  Index offset = 0;
  Index size = 0;
};

struct ProductBlock {
  ProxCatalogEntry entry;
  BlockRange range;
};

/// Blockwise prox of g(x) = Σ g_i(x_{block i}). Throws std::invalid_argument
/// unless the ranges partition [0, n) exactly.
class ProductProx final : public NonsmoothOracle {
public:
  explicit ProductProx(std::vector<ProductBlock> blocks);
  std::string name() const override { return "product"; }
  Index dimension() const override { return n_; }
  ExtendedReal gamma_threshold() const override { return threshold_; }
  const std::vector<ProductBlock>& blocks() const { return blocks_; }

private:
  ProxResult do_prox(const Vector& x, double gamma) const override;
  ExtendedReal do_value(const Vector& x) const override;
  std::vector<ProductBlock> blocks_;
  Index n_ = 0;
  ExtendedReal threshold_ = ExtendedReal::infinity();
};

std::shared_ptr<ProductProx> prox_product(std::vector<ProductBlock> blocks);

} // namespace zerofpr
