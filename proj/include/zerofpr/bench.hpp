#pragma once

#include "zerofpr/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace zerofpr {

enum class ExperimentKind { sparse_approx, dict_learning, mat_decomp };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

/// A problem instance plus what a run needs to start on it.
struct GeneratedProblem {
  Problem problem;
  Vector x0;
  bool force_adaptive = false;
  /// Planted solution where the generator has one (sparse_approx: x_orig;
  /// mat_decomp: [vec L₀; vec S₀]).
  std::optional<Vector> truth;
  std::string description;
};

/// Sparse approximation instance: A is (n/5)×n with N(0, 1/m) entries, b = A·x_orig + v,
/// x_orig with 5 Gaussian nonzeros, v ~ N(0, 1/m); g = λΣ√|xᵢ|. m = floor(n/5)
/// (at least 1). x⁰ = 0.
GeneratedProblem gen_sparse_approx(Index n, double lambda, std::uint64_t seed);

/// Variables [vec D (n×k); vec C (k×m)], column-major. f = ½‖Y − DC‖²_F with
/// Y = D_gen·C_gen + V (unit-norm dictionary columns, N Gaussian nonzeros per
/// code column, noise variance 1e-2). g constrains each dictionary column to
/// the unit sphere and each code column to ‖·‖₀ ≤ N, ‖·‖∞ ≤ T. x⁰ = 0;
/// adaptive γ. Projection of a zero dictionary column goes to a seeded random
/// unit vector per column.
GeneratedProblem gen_dict_learning(Index n, Index m, Index k, Index N, double T, std::uint64_t seed);

/// Variables [vec X_L; vec X_S], both m×n. f = ½‖A − X_L − X_S‖²_F (L_f = 2),
/// g = indicator{rank X_L ≤ r} + λ‖X_S‖₀. A = (rank-r background) + (sparse
/// foreground, about 5% of entries, magnitudes in [1, 2]) + noise·N(0, 1).
GeneratedProblem gen_mat_decomp(Index m, Index n, Index r, double lambda, std::uint64_t seed,
                                double noise = 1e-3);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::sparse_approx;
  Index n = 500;
  Index m = 100;
  Index k = 50;
  Index r = 1;
  Index nnz = 3;   // N in dictionary learning
  double bound = 1e6;  // T in dictionary learning
  double lambda = 0.1;
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> solvers{"fbs", "zerofpr-lbfgs"};
  std::optional<double> tol;  // kind default when absent
  int max_iters = 10000;
  int threads = 1;
  /// When false, wall_ms is written as 0 so outputs are byte-identical.
  bool wall_time = true;

  /// Paper-scale sizes for sparse_approx and dict_learning, 80×60 for mat_decomp.
  static ExperimentSpec defaults(ExperimentKind kind);

  double tolerance() const;
  /// Identifier used in the experiment column and trace file names.
  std::string id() const;
  void validate() const;
};

struct ResultRow {
  std::string experiment;
  std::string solver;
  std::uint64_t seed = 0;
  int iters = 0;
  std::uint64_t matvecs = 0;
  std::uint64_t prox_evals = 0;
  std::uint64_t smooth_evals = 0;  // not a CSV column
  double final_res = 0.0;
  double final_obj = 0.0;
  double wall_ms = 0.0;
  std::string status;
};

inline constexpr const char* kResultHeader =
    "experiment,solver,seed,iters,matvecs,prox_evals,final_res,final_obj,wall_ms,status";
inline constexpr const char* kTraceHeader = "k,res_norm,fbe,phibar,tau,backtracks,gamma,smooth_evals,prox_evals";

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_trace_csv(std::ostream& os, const RunTrace& trace);

/// Generates the problem for one seed of the spec.
GeneratedProblem generate(const ExperimentSpec& spec, std::uint64_t seed);

/// Solver settings a spec implies for a generated problem.
SolverConfig solver_config(const ExperimentSpec& spec, const GeneratedProblem& gp);

/// One ResultRow per (seed, solver), in seed-major order. Cells run on
/// spec.threads threads, each on its own problem instance. With out_dir,
/// writes results.csv and traces/<id>_<solver>_seed<s>.csv there. A solver
/// exception becomes status "error: ...".
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      const std::optional<std::string>& out_dir = std::nullopt);

using Settings = std::map<std::string, std::string>;

/// key=value lines; '#' starts a comment; blank lines ignored. Throws
/// std::invalid_argument on a malformed line.
Settings read_settings(std::istream& is);
Settings read_settings_file(const std::string& path);

/// Keys are the long CLI flag names: kind, n, m, k, r, nnz, bound, lambda,
/// seeds (a count: seeds 1..N), solvers (comma separated), tol, max-iters,
/// threads, wall-time (true/false). `out` is accepted and ignored here.
ExperimentSpec spec_from_settings(const Settings& s);

/// Problem files for solve/diagnose. kind ∈ {sparse_approx, dict_learning,
/// mat_decomp, quadratic, lasso, example33, power} plus that generator's
/// parameters (n, m, k, r, nnz, bound, lambda, seed, condition, noise).
GeneratedProblem problem_from_settings(const Settings& s);

/// Whitespace-separated reals.
Vector read_point_file(const std::string& path);
void write_point(std::ostream& os, const Vector& x);

} // namespace zerofpr
