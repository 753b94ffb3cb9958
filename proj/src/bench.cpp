#include "zerofpr/bench.hpp"

#include "zerofpr/prox.hpp"
#include "zerofpr/random.hpp"
#include "zerofpr/testlib.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace zerofpr {

std::string to_string(ExperimentKind k) {
  switch (k) {
  case ExperimentKind::sparse_approx: return "sparse_approx";
  case ExperimentKind::dict_learning: return "dict_learning";
  case ExperimentKind::mat_decomp: return "mat_decomp";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& s) {
  if (s == "sparse_approx") return ExperimentKind::sparse_approx;
  if (s == "dict_learning") return ExperimentKind::dict_learning;
  if (s == "mat_decomp") return ExperimentKind::mat_decomp;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

namespace {

std::vector<Index> random_support(Rng& rng, Index n, Index count) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(std::min(n, count)));
  return idx;
}

class DictionaryLoss final : public SmoothOracle {
public:
  DictionaryLoss(Matrix Y, Index k) : Y_(std::move(Y)), k_(k) {}
  Index dimension() const override { return Y_.rows() * k_ + k_ * Y_.cols(); }

private:
  SmoothEval do_eval(const Vector& x) const override {
    const Index n = Y_.rows();
    const Index m = Y_.cols();
    Eigen::Map<const Matrix> D(x.data(), n, k_);
    Eigen::Map<const Matrix> C(x.data() + n * k_, k_, m);
    const Matrix E = D * C - Y_;
    SmoothEval out;
    out.value = 0.5 * E.squaredNorm();
    out.gradient.resize(x.size());
    Eigen::Map<Matrix>(out.gradient.data(), n, k_) = E * C.transpose();
    Eigen::Map<Matrix>(out.gradient.data() + n * k_, k_, m) = D.transpose() * E;
    return out;
  }
  Matrix Y_;
  Index k_;
};

class DecompositionLoss final : public SmoothOracle {
public:
  explicit DecompositionLoss(Matrix A) : A_(std::move(A)) {}
  Index dimension() const override { return 2 * A_.size(); }

private:
  SmoothEval do_eval(const Vector& x) const override {
    const Index s = A_.size();
    Eigen::Map<const Vector> a(A_.data(), s);
    const Vector res = x.head(s) + x.tail(s) - a;
    SmoothEval out;
    out.value = 0.5 * res.squaredNorm();
    out.gradient.resize(2 * s);
    out.gradient.head(s) = res;
    out.gradient.tail(s) = res;
    return out;
  }
  Matrix A_;
};

} // namespace

GeneratedProblem gen_sparse_approx(Index n, double lambda, std::uint64_t seed) {
  if (n < 1 || lambda < 0.0) throw std::invalid_argument("gen_sparse_approx: need n >= 1, lambda >= 0");
  Rng rng(seed);
  const Index m = std::max<Index>(1, n / 5);
  const double sd = 1.0 / std::sqrt(static_cast<double>(m));
  Matrix A = rng.normal_matrix(m, n, sd);
  Vector x_orig = Vector::Zero(n);
  for (Index i : random_support(rng, n, 5)) x_orig(i) = rng.normal();
  const Vector v = rng.normal_vector(m, sd);
  Vector b = A * x_orig + v;
  const double s = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);

  GeneratedProblem out;
  out.problem = make_problem(compose_least_squares(std::move(A), std::move(b)),
                             std::make_shared<LHalfProx>(lambda), n, s * s);
  out.x0 = Vector::Zero(n);
  out.truth = x_orig;
  std::ostringstream os;
  os << "sparse_approx m=" << m << " n=" << n << " lambda=" << lambda << " seed=" << seed;
  out.description = os.str();
  return out;
}

GeneratedProblem gen_dict_learning(Index n, Index m, Index k, Index N, double T, std::uint64_t seed) {
  if (n < 1 || m < 1 || k < 1 || N < 1 || N > k || !(T > 0.0)) {
    throw std::invalid_argument("gen_dict_learning: bad sizes");
  }
  Rng rng(seed);
  Matrix D = rng.normal_matrix(n, k);
  for (Index j = 0; j < k; ++j) D.col(j).normalize();
  Matrix C = Matrix::Zero(k, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i : random_support(rng, k, N)) C(i, j) = rng.normal();
  }
  const Matrix Y = D * C + rng.normal_matrix(n, m, 0.1);

  std::vector<ProductBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(k + m));
  for (Index j = 0; j < k; ++j) {
    Vector e = rng.normal_vector(n);
    e.normalize();
    blocks.push_back({sphere_entry(n, std::move(e)), {j * n, n}});
  }
  for (Index j = 0; j < m; ++j) blocks.push_back({box_l0_entry(k, N, T), {n * k + j * k, k}});

  const Index dim = n * k + k * m;
  GeneratedProblem out;
  out.problem = make_problem(std::make_shared<DictionaryLoss>(Y, k), prox_product(std::move(blocks)), dim);
  out.x0 = Vector::Zero(dim);
  out.force_adaptive = true;
  std::ostringstream os;
  os << "dict_learning n=" << n << " m=" << m << " k=" << k << " N=" << N << " T=" << T << " seed=" << seed;
  out.description = os.str();
  return out;
}

GeneratedProblem gen_mat_decomp(Index m, Index n, Index r, double lambda, std::uint64_t seed, double noise) {
  if (m < 1 || n < 1 || r < 0 || r > std::min(m, n) || lambda < 0.0 || noise < 0.0) {
    throw std::invalid_argument("gen_mat_decomp: bad sizes");
  }
  Rng rng(seed);
  const Matrix L0 = rng.normal_matrix(m, r) * rng.normal_matrix(r, n);
  Matrix S0 = Matrix::Zero(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      if (rng.uniform() < 0.05) S0(i, j) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(1.0, 2.0);
    }
  }
  Matrix A = L0 + S0;
  if (noise > 0.0) A += rng.normal_matrix(m, n, noise);

  const Index s = m * n;
  std::vector<ProductBlock> blocks{{rank_entry(m, n, r), {0, s}}, {l0_entry(lambda), {s, s}}};
  GeneratedProblem out;
  out.problem = make_problem(std::make_shared<DecompositionLoss>(std::move(A)), prox_product(std::move(blocks)),
                             2 * s, 2.0);
  out.x0 = Vector::Zero(2 * s);
  Vector truth(2 * s);
  truth.head(s) = Eigen::Map<const Vector>(L0.data(), s);
  truth.tail(s) = Eigen::Map<const Vector>(S0.data(), s);
  out.truth = std::move(truth);
  std::ostringstream os;
  os << "mat_decomp m=" << m << " n=" << n << " r=" << r << " lambda=" << lambda << " seed=" << seed;
  out.description = os.str();
  return out;
}

ExperimentSpec ExperimentSpec::defaults(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  switch (kind) {
  case ExperimentKind::sparse_approx:
    s.n = 500;
    s.m = 100;
    s.lambda = 0.1;
    break;
  case ExperimentKind::dict_learning:
    s.n = 20;
    s.m = 500;
    s.k = 50;
    s.nnz = 3;
    s.bound = 1e6;
    break;
  case ExperimentKind::mat_decomp:
    s.m = 80;
    s.n = 60;
    s.r = 1;
    s.lambda = 3e-3;
    break;
  }
  return s;
}

double ExperimentSpec::tolerance() const {
  if (tol) return *tol;
  return kind == ExperimentKind::dict_learning ? 1e-4 : 1e-6;
}

std::string ExperimentSpec::id() const {
  std::ostringstream os;
  os << to_string(kind);
  switch (kind) {
  case ExperimentKind::sparse_approx: os << "_n" << n << "_lambda" << lambda; break;
  case ExperimentKind::dict_learning: os << "_n" << n << "_m" << m << "_k" << k << "_N" << nnz; break;
  case ExperimentKind::mat_decomp: os << "_m" << m << "_n" << n << "_r" << r << "_lambda" << lambda; break;
  }
  return os.str();
}

void ExperimentSpec::validate() const {
  if (n < 1 || m < 1 || k < 1 || r < 0 || nnz < 1 || !(bound > 0.0) || lambda < 0.0) {
    throw std::invalid_argument("experiment spec: sizes must be positive and lambda nonnegative");
  }
  if (seeds.empty()) throw std::invalid_argument("experiment spec: no seeds");
  if (solvers.empty()) throw std::invalid_argument("experiment spec: no solvers");
  if (tol && !(*tol > 0.0)) throw std::invalid_argument("experiment spec: tol must be positive");
  if (max_iters < 0 || threads < 1) throw std::invalid_argument("experiment spec: bad max-iters or threads");
}

namespace {

void put_real(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

} // namespace

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kResultHeader << '\n';
  for (const ResultRow& r : rows) {
    os << r.experiment << ',' << r.solver << ',' << r.seed << ',' << r.iters << ',' << r.matvecs << ','
       << r.prox_evals << ',';
    put_real(os, r.final_res);
    os << ',';
    put_real(os, r.final_obj);
    char buf[40];
    std::snprintf(buf, sizeof buf, ",%.3f,", r.wall_ms);
    os << buf;
    // Error messages may contain commas.
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    os << status << '\n';
  }
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << kTraceHeader << '\n';
  for (const IterationRecord& r : trace.iters) {
    os << r.k << ',';
    put_real(os, r.res_norm);
    os << ',';
    put_real(os, r.fbe);
    os << ',';
    put_real(os, r.phibar);
    os << ',';
    put_real(os, r.tau);
    os << ',' << r.backtracks << ',';
    put_real(os, r.gamma);
    os << ',' << r.smooth_evals << ',' << r.prox_evals << '\n';
  }
}

GeneratedProblem generate(const ExperimentSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
  case ExperimentKind::sparse_approx: return gen_sparse_approx(spec.n, spec.lambda, seed);
  case ExperimentKind::dict_learning: return gen_dict_learning(spec.n, spec.m, spec.k, spec.nnz, spec.bound, seed);
  case ExperimentKind::mat_decomp: return gen_mat_decomp(spec.m, spec.n, spec.r, spec.lambda, seed);
  }
  throw std::invalid_argument("generate: unknown kind");
}

SolverConfig solver_config(const ExperimentSpec& spec, const GeneratedProblem& gp) {
  SolverConfig cfg;
  cfg.tol = spec.tolerance();
  cfg.max_iters = spec.max_iters;
  cfg.adaptive_gamma = gp.force_adaptive;
  return cfg;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, const std::optional<std::string>& out_dir) {
  spec.validate();
  const std::string id = spec.id();
  const std::size_t ns = spec.solvers.size();
  const std::size_t cells = spec.seeds.size() * ns;
  std::vector<ResultRow> rows(cells);
  std::vector<RunTrace> traces(out_dir ? cells : 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next.fetch_add(1); c < cells; c = next.fetch_add(1)) {
      ResultRow& row = rows[c];
      row.experiment = id;
      row.seed = spec.seeds[c / ns];
      row.solver = spec.solvers[c % ns];
      try {
        const GeneratedProblem gp = generate(spec, row.seed);
        const SolverConfig cfg = solver_config(spec, gp);
        const auto t0 = std::chrono::steady_clock::now();
        RunTrace trace = solve_by_name(row.solver, gp.problem, gp.x0, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        row.iters = trace.iterations();
        row.matvecs = trace.totals.matvecs();
        row.prox_evals = trace.totals.prox_evals;
        row.smooth_evals = trace.totals.smooth_evals;
        row.final_res = trace.final_residual;
        row.final_obj = gp.problem.objective(trace.solution).to_double();
        row.wall_ms = spec.wall_time ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
        row.status = to_string(trace.status);
        if (out_dir) traces[c] = std::move(trace);
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
    }
  };

  const int nthreads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(spec.threads), cells));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  if (out_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(*out_dir);
    fs::create_directories(dir / "traces");
    std::ofstream res(dir / "results.csv");
    if (!res) throw std::runtime_error("cannot write " + (dir / "results.csv").string());
    write_results_csv(res, rows);
    for (std::size_t c = 0; c < cells; ++c) {
      std::ostringstream name;
      name << id << '_' << rows[c].solver << "_seed" << rows[c].seed << ".csv";
      std::ofstream tf(dir / "traces" / name.str());
      write_trace_csv(tf, traces[c]);
    }
  }
  return rows;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const Settings& s, const std::string& key, double fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  std::size_t used = 0;
  const double v = std::stod(it->second, &used);
  if (used != it->second.size()) throw std::invalid_argument("bad number for " + key + ": " + it->second);
  return v;
}

long long to_int(const Settings& s, const std::string& key, long long fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  std::size_t used = 0;
  const long long v = std::stoll(it->second, &used);
  if (used != it->second.size()) throw std::invalid_argument("bad integer for " + key + ": " + it->second);
  return v;
}

bool to_bool(const Settings& s, const std::string& key, bool fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw std::invalid_argument("bad boolean for " + key + ": " + it->second);
}

void reject_unknown(const Settings& s, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : s) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw std::invalid_argument("unknown setting: " + key);
    }
  }
}

} // namespace

Settings read_settings(std::istream& is) {
  Settings out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw std::invalid_argument("settings line " + std::to_string(lineno) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

Settings read_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_settings(in);
}

ExperimentSpec spec_from_settings(const Settings& s) {
  reject_unknown(s, {"kind", "n", "m", "k", "r", "nnz", "bound", "lambda", "seeds", "solvers", "tol",
                     "max-iters", "threads", "wall-time", "out"});
  const auto kind = s.find("kind");
  if (kind == s.end()) throw std::invalid_argument("settings: kind is required");
  ExperimentSpec spec = ExperimentSpec::defaults(parse_kind(kind->second));
  spec.n = to_int(s, "n", spec.n);
  spec.m = spec.kind == ExperimentKind::sparse_approx ? std::max<Index>(1, spec.n / 5) : spec.m;
  spec.m = to_int(s, "m", spec.m);
  spec.k = to_int(s, "k", spec.k);
  spec.r = to_int(s, "r", spec.r);
  spec.nnz = to_int(s, "nnz", spec.nnz);
  spec.bound = to_real(s, "bound", spec.bound);
  spec.lambda = to_real(s, "lambda", spec.lambda);
  const long long nseeds = to_int(s, "seeds", 1);
  if (nseeds < 1) throw std::invalid_argument("settings: seeds must be at least 1");
  spec.seeds.clear();
  for (long long i = 1; i <= nseeds; ++i) spec.seeds.push_back(static_cast<std::uint64_t>(i));
  if (const auto it = s.find("solvers"); it != s.end()) {
    spec.solvers.clear();
    std::stringstream ss(it->second);
    std::string name;
    while (std::getline(ss, name, ',')) {
      name = trim(name);
      if (!name.empty()) spec.solvers.push_back(name);
    }
  }
  if (s.count("tol")) spec.tol = to_real(s, "tol", 0.0);
  spec.max_iters = static_cast<int>(to_int(s, "max-iters", spec.max_iters));
  spec.threads = static_cast<int>(to_int(s, "threads", spec.threads));
  spec.wall_time = to_bool(s, "wall-time", spec.wall_time);
  spec.validate();
  return spec;
}

GeneratedProblem problem_from_settings(const Settings& s) {
  reject_unknown(s, {"kind", "n", "m", "k", "r", "nnz", "bound", "lambda", "seed", "condition", "noise"});
  const auto it = s.find("kind");
  if (it == s.end()) throw std::invalid_argument("problem file: kind is required");
  const std::string& kind = it->second;
  const auto seed = static_cast<std::uint64_t>(to_int(s, "seed", 1));

  auto from_analytic = [](AnalyticProblem ap) {
    GeneratedProblem gp;
    gp.problem = std::move(ap.problem);
    gp.x0 = Vector::Zero(gp.problem.dimension);
    gp.truth = std::move(ap.known_minimizer);
    gp.description = std::move(ap.description);
    return gp;
  };

  if (kind == "sparse_approx") return gen_sparse_approx(to_int(s, "n", 500), to_real(s, "lambda", 0.1), seed);
  if (kind == "dict_learning") {
    return gen_dict_learning(to_int(s, "n", 20), to_int(s, "m", 500), to_int(s, "k", 50), to_int(s, "nnz", 3),
                             to_real(s, "bound", 1e6), seed);
  }
  if (kind == "mat_decomp") {
    return gen_mat_decomp(to_int(s, "m", 80), to_int(s, "n", 60), to_int(s, "r", 1), to_real(s, "lambda", 3e-3),
                          seed, to_real(s, "noise", 1e-3));
  }
  if (kind == "quadratic") return from_analytic(make_quadratic(to_int(s, "n", 20), to_real(s, "condition", 100.0), seed));
  if (kind == "lasso") {
    return from_analytic(make_lasso(to_int(s, "m", 40), to_int(s, "n", 20), to_real(s, "lambda", 0.1), seed));
  }
  if (kind == "example33") return from_analytic(make_example_3_3());
  if (kind == "power") return from_analytic(make_l1_plus_power());
  throw std::invalid_argument("problem file: unknown kind " + kind);
}

Vector read_point_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    vals.push_back(std::stod(tok, &used));
    if (used != tok.size()) throw std::invalid_argument("point file: bad number " + tok);
  }
  return Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
}

void write_point(std::ostream& os, const Vector& x) {
  for (Index i = 0; i < x.size(); ++i) {
    put_real(os, x(i));
    os << '\n';
  }
}

} // namespace zerofpr
