// zerofpr: bench / solve / diagnose front end.

#include "zerofpr/bench.hpp"
#include "zerofpr/diagnostics.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace zerofpr;

namespace {

struct Flag {
  const char* key;
  const char* help;
  std::string value;
};

int run_bench(const std::string& kind, const std::string& config, std::vector<Flag>& flags) {
  Settings s = config.empty() ? Settings{} : read_settings_file(config);
  if (!kind.empty()) s["kind"] = kind;
  for (const Flag& f : flags) {
    if (!f.value.empty()) s[f.key] = f.value;
  }
  const ExperimentSpec spec = spec_from_settings(s);
  std::optional<std::string> out;
  if (auto it = s.find("out"); it != s.end()) out = it->second;
  const auto rows = run_experiment(spec, out);
  write_results_csv(std::cout, rows);
  return 0;
}

int run_solve(const std::string& problem_file, const std::string& solver, double tol, int max_iters,
              const std::string& trace_file, const std::string& point_file) {
  const GeneratedProblem gp = problem_from_settings(read_settings_file(problem_file));
  SolverConfig cfg;
  cfg.tol = tol;
  cfg.max_iters = max_iters;
  cfg.adaptive_gamma = gp.force_adaptive || !gp.problem.lipschitz_estimate;
  const RunTrace tr = solve_by_name(solver, gp.problem, gp.x0, cfg);
  std::printf("problem    %s\n", gp.description.c_str());
  std::printf("solver     %s\n", tr.solver.c_str());
  std::printf("status     %s\n", to_string(tr.status).c_str());
  std::printf("iters      %d\n", tr.iterations());
  std::printf("residual   %.6e\n", tr.final_residual);
  std::printf("objective  %.12g\n", gp.problem.objective(tr.solution).to_double());
  std::printf("f evals    %llu\n", static_cast<unsigned long long>(tr.totals.smooth_evals));
  std::printf("prox evals %llu\n", static_cast<unsigned long long>(tr.totals.prox_evals));
  std::printf("matvecs    %llu\n", static_cast<unsigned long long>(tr.totals.matvecs()));
  if (!trace_file.empty()) {
    std::ofstream os(trace_file);
    write_trace_csv(os, tr);
  }
  if (!point_file.empty()) {
    std::ofstream os(point_file);
    write_point(os, tr.solution);
  }
  return tr.status == RunStatus::converged ? 0 : 2;
}

int run_diagnose(const std::string& problem_file, const std::string& point_file, double gamma) {
  const GeneratedProblem gp = problem_from_settings(read_settings_file(problem_file));
  const Vector x = read_point_file(point_file);
  if (x.size() != gp.problem.dimension) {
    std::fprintf(stderr, "point has %ld entries, problem has %ld\n", static_cast<long>(x.size()),
                 static_cast<long>(gp.problem.dimension));
    return 1;
  }
  if (!(gamma > 0.0)) {
    const double L = gp.problem.lipschitz_estimate ? *gp.problem.lipschitz_estimate : estimate_initial_L(gp.problem, x);
    gamma = 0.5 / L;
  }
  const SecondOrderReport rep = second_order_report(gp.problem, x, gamma);
  std::printf("gamma            %.6e\n", gamma);
  std::printf("residual         %.6e\n", rep.residual_norm);
  std::printf("symmetry defect  %.6e\n", rep.symmetry_defect);
  std::printf("min eigenvalue   %.6e\n", rep.min_eigenvalue);
  std::printf("prox single-valued %s\n", rep.prox_single_valued ? "yes" : "no");
  if (rep.warning) std::printf("warning: %s\n", rep.warning->c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"ZeroFPR benchmarks and diagnostics"};
  app.require_subcommand(1);

  auto* bench = app.add_subcommand("bench", "run an experiment grid and print result rows");
  std::string kind;
  std::string config;
  std::vector<Flag> flags{
      {"n", "size n", {}},
      {"m", "size m", {}},
      {"k", "dictionary size k", {}},
      {"r", "rank bound r", {}},
      {"nnz", "nonzeros per code column (N)", {}},
      {"bound", "code magnitude bound (T)", {}},
      {"lambda", "regularization weight", {}},
      {"seeds", "number of seeds (1..N)", {}},
      {"solvers", "comma-separated solver names", {}},
      {"tol", "residual tolerance", {}},
      {"max-iters", "iteration cap", {}},
      {"out", "output directory for results.csv and traces/", {}},
      {"threads", "worker threads", {}},
      {"wall-time", "record wall time (true/false)", {}},
  };
  bench->add_option("kind", kind, "sparse_approx | dict_learning | mat_decomp");
  bench->add_option("--config", config, "key=value file; flags given here override it");
  for (Flag& f : flags) bench->add_option(std::string("--") + f.key, f.value, f.help);

  auto* solve = app.add_subcommand("solve", "solve one problem file");
  std::string problem_file;
  std::string solver = "zerofpr-lbfgs";
  double tol = 1e-6;
  int max_iters = 10000;
  std::string trace_file;
  std::string save_point;
  solve->add_option("--problem", problem_file, "problem file")->required();
  solve->add_option("--solver", solver, "fbs | ifbs | afbs | zerofpr-<null|broyden|bfgs|sbfgs|lbfgs>");
  solve->add_option("--tol", tol, "residual tolerance");
  solve->add_option("--max-iters", max_iters, "iteration cap");
  solve->add_option("--trace", trace_file, "write the per-iteration trace CSV here");
  solve->add_option("--save-point", save_point, "write the solution here");

  auto* diagnose = app.add_subcommand("diagnose", "second-order report at a point");
  std::string diag_problem;
  std::string point_file;
  double gamma = 0.0;
  diagnose->add_option("--problem", diag_problem, "problem file")->required();
  diagnose->add_option("--point", point_file, "point file")->required();
  diagnose->add_option("--gamma", gamma, "stepsize (default 0.5/L)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) return run_bench(kind, config, flags);
    if (*solve) return run_solve(problem_file, solver, tol, max_iters, trace_file, save_point);
    if (*diagnose) return run_diagnose(diag_problem, point_file, gamma);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
