#include "zerofpr/bench.hpp"
#include "zerofpr/fbe.hpp"
#include "zerofpr/random.hpp"

#include <doctest.h>
#include <oracles.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace zerofpr;

namespace {

double f_value(const Problem& p, const Vector& x) { return p.smooth->eval(x).value; }

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

ExperimentSpec small_sparse() {
  ExperimentSpec s = ExperimentSpec::defaults(ExperimentKind::sparse_approx);
  s.n = 100;
  s.lambda = 0.05;
  s.wall_time = false;
  return s;
}

} // namespace

TEST_CASE("kind names round-trip") {
  for (ExperimentKind k : {ExperimentKind::sparse_approx, ExperimentKind::dict_learning, ExperimentKind::mat_decomp}) {
    CHECK(parse_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_kind("svm"), std::invalid_argument);
}

TEST_CASE("spec defaults and validation") {
  const ExperimentSpec sp = ExperimentSpec::defaults(ExperimentKind::sparse_approx);
  CHECK(sp.n == 500);
  CHECK(sp.lambda == 0.1);
  CHECK(sp.tolerance() == 1e-6);
  const ExperimentSpec dl = ExperimentSpec::defaults(ExperimentKind::dict_learning);
  CHECK(dl.n == 20);
  CHECK(dl.m == 500);
  CHECK(dl.k == 50);
  CHECK(dl.nnz == 3);
  CHECK(dl.bound == 1e6);
  CHECK(dl.tolerance() == 1e-4);
  const ExperimentSpec md = ExperimentSpec::defaults(ExperimentKind::mat_decomp);
  CHECK(md.r == 1);
  CHECK(md.lambda == 3e-3);

  ExperimentSpec bad = sp;
  bad.seeds.clear();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = sp;
  bad.tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = sp;
  bad.threads = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK(sp.id() != dl.id());
}

TEST_CASE("sparse approximation instance") {
  const GeneratedProblem gp = gen_sparse_approx(500, 0.1, 4);
  const auto& ls = dynamic_cast<const LeastSquares&>(*gp.problem.smooth);
  CHECK(ls.matrix().rows() == 100);
  CHECK(ls.matrix().cols() == 500);
  REQUIRE(gp.truth);
  CHECK((gp.truth->array() != 0.0).count() == 5);
  CHECK(gp.x0 == Vector::Zero(500));
  CHECK_FALSE(gp.force_adaptive);
  const double smax = Eigen::JacobiSVD<Matrix>(ls.matrix()).singularValues()(0);
  CHECK(*gp.problem.lipschitz_estimate == doctest::Approx(smax * smax).epsilon(1e-10));

  // Sample variance of the first 100 columns ≈ 1/m.
  const Matrix& A = ls.matrix();
  for (Index j = 0; j < 100; ++j) {
    const double mean = A.col(j).mean();
    const double var = (A.col(j).array() - mean).square().sum() / static_cast<double>(A.rows() - 1);
    CAPTURE(j);
    CHECK(var == doctest::Approx(1.0 / 100).epsilon(0.2 * 3));
  }
  double pooled = 0.0;
  for (Index j = 0; j < 100; ++j) pooled += A.col(j).squaredNorm();
  pooled /= 100.0 * static_cast<double>(A.rows());
  CHECK(pooled == doctest::Approx(1.0 / 100).epsilon(0.2));

  CHECK(gen_sparse_approx(12, 0.1, 1).problem.dimension == 12);
  CHECK(dynamic_cast<const LeastSquares&>(*gen_sparse_approx(12, 0.1, 1).problem.smooth).matrix().rows() == 2);
}

TEST_CASE("sparse approximation with lambda = 0 is gradient descent") {
  const GeneratedProblem gp = gen_sparse_approx(50, 0.0, 2);
  const double gamma = 0.5 / *gp.problem.lipschitz_estimate;
  Rng rng(1);
  const Vector x = rng.normal_vector(50);
  const ProxGradStep s = prox_grad_step(gp.problem, x, gamma);
  CHECK((s.x_bar - (x - gamma * s.grad_f_x)).norm() <= 1e-14 * (1 + x.norm()));
}

TEST_CASE("least-squares matvecs are two per smooth eval") {
  const GeneratedProblem gp = gen_sparse_approx(100, 0.1, 1);
  SolverConfig cfg;
  cfg.tol = 1e-6;
  const RunTrace t = solve_by_name("zerofpr-lbfgs", gp.problem, gp.x0, cfg);
  CHECK(t.totals.matvecs() == 2 * t.totals.smooth_evals);
}

TEST_CASE("dictionary learning instance") {
  const ExperimentSpec d = ExperimentSpec::defaults(ExperimentKind::dict_learning);
  const GeneratedProblem big = gen_dict_learning(d.n, d.m, d.k, d.nnz, d.bound, 1);
  CHECK(big.problem.dimension == 26000);
  CHECK(big.force_adaptive);
  CHECK_FALSE(big.problem.lipschitz_estimate);

  const Index n = 4, m = 6, k = 3, N = 2;
  const GeneratedProblem gp = gen_dict_learning(n, m, k, N, 1e6, 3);
  CHECK(gp.x0 == Vector::Zero(n * k + k * m));
  CHECK(gp.problem.smooth->eval(gp.x0).gradient.lpNorm<Eigen::Infinity>() == 0.0);
  const Vector fd0 = oracle::central_gradient([&](const Vector& v) { return f_value(gp.problem, v); }, gp.x0);
  CHECK(fd0.lpNorm<Eigen::Infinity>() <= 1e-8);

  Rng rng(5);
  const Vector x = rng.normal_vector(gp.problem.dimension);
  const Vector g = gp.problem.smooth->eval(x).gradient;
  const Vector fd = oracle::central_gradient([&](const Vector& v) { return f_value(gp.problem, v); }, x);
  CHECK((g - fd).lpNorm<Eigen::Infinity>() <= 1e-6 * (1 + g.lpNorm<Eigen::Infinity>()));

  // Feasibility of the prox at a random point.
  const Vector z = gp.problem.nonsmooth->prox(x, 0.1).z;
  for (Index j = 0; j < k; ++j) CHECK(z.segment(j * n, n).norm() == doctest::Approx(1.0).epsilon(1e-12));
  for (Index j = 0; j < m; ++j) CHECK((z.segment(n * k + j * k, k).array() != 0.0).count() <= N);
  // Zero dictionary columns do not all project to the same vector.
  const Vector z0 = gp.problem.nonsmooth->prox(gp.x0, 0.1).z;
  CHECK((z0.segment(0, n) - z0.segment(n, n)).norm() > 1e-3);
}

TEST_CASE("matrix decomposition instance") {
  const Index m = 12, n = 9, r = 2;
  const GeneratedProblem gp = gen_mat_decomp(m, n, r, 3e-3, 2, 0.0);
  CHECK(gp.problem.dimension == 2 * m * n);
  CHECK(*gp.problem.lipschitz_estimate == 2.0);
  REQUIRE(gp.truth);
  const Eigen::Map<const Matrix> L0(gp.truth->data(), m, n);
  CHECK(oracle::rank_tail_energy(L0, r) <= 1e-20 * L0.squaredNorm());

  // Noiseless, started at the planted pair: a fixed point.
  const ProxGradStep s = prox_grad_step(gp.problem, *gp.truth, 0.4);
  CHECK(s.residual_norm() <= 1e-10);

  Rng rng(6);
  const Vector x = rng.normal_vector(gp.problem.dimension);
  const Vector g = gp.problem.smooth->eval(x).gradient;
  const Vector fd = oracle::central_gradient([&](const Vector& v) { return f_value(gp.problem, v); }, x);
  CHECK((g - fd).lpNorm<Eigen::Infinity>() <= 1e-6 * (1 + g.lpNorm<Eigen::Infinity>()));

  // The prox splits into a rank projection and a hard threshold.
  const double gamma = 0.3;
  const Vector z = gp.problem.nonsmooth->prox(x, gamma).z;
  const Eigen::Map<const Matrix> X(x.data(), m, n);
  const Eigen::Map<const Matrix> ZL(z.data(), m, n);
  CHECK((X - ZL).squaredNorm() == doctest::Approx(oracle::rank_tail_energy(X, r)).epsilon(1e-8));
  const double cut = std::sqrt(2 * gamma * 3e-3);
  for (Index i = 0; i < m * n; ++i) {
    const double v = x(m * n + i);
    if (std::abs(v) > cut * 1.0000001) CHECK(z(m * n + i) == v);
    if (std::abs(v) < cut * 0.9999999) CHECK(z(m * n + i) == 0.0);
  }
}

TEST_CASE("run_experiment rows, determinism and files") {
  ExperimentSpec spec = small_sparse();
  spec.solvers = {"fbs", "zerofpr-lbfgs"};
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].solver == "fbs");
  CHECK(rows[1].solver == "zerofpr-lbfgs");
  CHECK(rows[0].seed == 1);
  CHECK(rows[1].status == "converged");
  CHECK(rows[1].wall_ms == 0.0);

  const auto dir = std::filesystem::temp_directory_path() / "zerofpr_test_bench";
  std::filesystem::remove_all(dir);
  spec.seeds = {1, 2};
  spec.threads = 3;
  run_experiment(spec, (dir / "a").string());
  spec.threads = 1;
  run_experiment(spec, (dir / "b").string());
  const std::string a = slurp(dir / "a" / "results.csv");
  CHECK(a.rfind(kResultHeader, 0) == 0);
  CHECK(a == slurp(dir / "b" / "results.csv"));
  const auto trace = dir / "a" / "traces" / (spec.id() + "_zerofpr-lbfgs_seed2.csv");
  REQUIRE(std::filesystem::exists(trace));
  const std::string t = slurp(trace);
  CHECK(t.rfind(kTraceHeader, 0) == 0);
  CHECK(t == slurp(dir / "b" / "traces" / (spec.id() + "_zerofpr-lbfgs_seed2.csv")));
  std::filesystem::remove_all(dir);
}

TEST_CASE("solver errors become a status") {
  ExperimentSpec spec = small_sparse();
  spec.solvers = {"newton", "fbs"};
  spec.max_iters = 5;
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].status.rfind("error: ", 0) == 0);
  CHECK(rows[1].status == "max_iters");
}

TEST_CASE("results csv format") {
  ResultRow r;
  r.experiment = "x";
  r.solver = "fbs";
  r.seed = 3;
  r.iters = 7;
  r.matvecs = 16;
  r.prox_evals = 8;
  r.final_res = 0.1;
  r.final_obj = -2.5;
  r.wall_ms = 1.25;
  r.status = "error: a, b";
  std::ostringstream os;
  write_results_csv(os, {r});
  CHECK(os.str() == std::string(kResultHeader) + "\nx,fbs,3,7,16,8,0.10000000000000001,-2.5,1.250,error: a; b\n");
}

TEST_CASE("settings files") {
  std::istringstream is("# comment\nkind = dict_learning\n\nn=8 # trailing\nm=12\nk=4\nseeds=3\nsolvers=fbs, zerofpr-lbfgs\n"
                        "tol=1e-3\nmax-iters=50\nthreads=2\nwall-time=false\nout=/tmp/x\n");
  const Settings s = read_settings(is);
  CHECK(s.at("kind") == "dict_learning");
  CHECK(s.at("n") == "8");
  const ExperimentSpec spec = spec_from_settings(s);
  CHECK(spec.kind == ExperimentKind::dict_learning);
  CHECK(spec.n == 8);
  CHECK(spec.m == 12);
  CHECK(spec.k == 4);
  CHECK(spec.nnz == 3);
  CHECK(spec.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(spec.solvers == std::vector<std::string>{"fbs", "zerofpr-lbfgs"});
  CHECK(*spec.tol == 1e-3);
  CHECK(spec.max_iters == 50);
  CHECK(spec.threads == 2);
  CHECK_FALSE(spec.wall_time);

  std::istringstream bad_line("n 8\n");
  CHECK_THROWS_AS(read_settings(bad_line), std::invalid_argument);
  CHECK_THROWS_AS(spec_from_settings({{"colour", "red"}}), std::invalid_argument);
  CHECK_THROWS_AS(spec_from_settings({{"n", "eight"}}), std::invalid_argument);

  const GeneratedProblem q = problem_from_settings({{"kind", "quadratic"}, {"n", "5"}, {"condition", "10"}});
  CHECK(q.problem.dimension == 5);
  const GeneratedProblem e = problem_from_settings({{"kind", "example33"}});
  CHECK(e.problem.dimension == 1);
  CHECK_THROWS_AS(problem_from_settings({{"kind", "nope"}}), std::invalid_argument);
}

TEST_CASE("point files round-trip") {
  Rng rng(2);
  const Vector x = rng.normal_vector(7);
  const auto path = std::filesystem::temp_directory_path() / "zerofpr_point.txt";
  {
    std::ofstream os(path);
    write_point(os, x);
  }
  CHECK(read_point_file(path.string()) == x);
  std::filesystem::remove(path);
}
