// Independent reference computations used by the tests. Nothing here calls
// into the library's prox or step code.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct GridMin {
  double z = 0.0;
  double value = std::numeric_limits<double>::infinity();
  double spacing = 0.0;
};

// Minimizes h over `points` equispaced nodes of [lo, hi]; extra candidates are
// also evaluated (e.g. 0 for functions with a kink or jump there).
inline GridMin grid_min(const std::function<double(double)>& h, double lo, double hi, int points,
                        const std::vector<double>& extra = {}) {
  GridMin best;
  best.spacing = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double z = lo + best.spacing * i;
    const double v = h(z);
    if (v < best.value) best = {z, v, best.spacing};
  }
  for (double z : extra) {
    const double v = h(z);
    if (v < best.value) best = {z, v, best.spacing};
  }
  return best;
}

// Best projection onto {‖c‖₀ ≤ N, ‖c‖∞ ≤ T} by trying every support of size N.
inline Vec enumerate_box_l0(const Vec& c, int N, double T) {
  const int n = static_cast<int>(c.size());
  std::vector<bool> pick(static_cast<std::size_t>(n), false);
  std::fill(pick.begin(), pick.begin() + N, true);
  Vec best;
  double best_d = std::numeric_limits<double>::infinity();
  do {
    Vec z = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (pick[static_cast<std::size_t>(i)]) z(i) = std::clamp(c(i), -T, T);
    }
    const double d = (z - c).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = z;
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

inline Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  Vec p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    p(i) = x(i) + h;
    const double fp = f(p);
    p(i) = x(i) - h;
    const double fm = f(p);
    p(i) = x(i);
    g(i) = (fp - fm) / (2 * h);
  }
  return g;
}

// ‖X − best rank-r approximation‖²_F from the full singular spectrum.
inline double rank_tail_energy(const Mat& X, int r) {
  const Vec s = Eigen::BDCSVD<Mat>(X).singularValues();
  double e = 0.0;
  for (Eigen::Index i = r; i < s.size(); ++i) e += s(i) * s(i);
  return e;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

} // namespace oracle
