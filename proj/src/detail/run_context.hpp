#pragma once

#include "zerofpr/solver.hpp"

#include <chrono>

namespace zerofpr::detail {

GammaManager initial_gamma(const Problem& p, const Vector& x0, const SolverConfig& cfg);

/// Bookkeeping shared by every solver loop: counter baseline, clock, trace.
class RunContext {
public:
  RunContext(const Problem& p, std::string solver)
      : p_(p), start_counts_(p.counts()), start_(std::chrono::steady_clock::now()) {
    trace.solver = std::move(solver);
  }

  void fill(IterationRecord& rec, const ProxGradStep& step, double phibar, const GammaManager& mgr) const {
    rec.res_norm = step.residual_norm();
    rec.fbe = step.fbe;
    rec.phibar = phibar;
    rec.gamma = mgr.gamma;
    rec.sigma = mgr.sigma;
  }

  void push(IterationRecord rec) {
    const OracleCounts c = p_.counts() - start_counts_;
    rec.smooth_evals = c.smooth_evals;
    rec.prox_evals = c.prox_evals;
    rec.matvecs = c.matvecs();
    rec.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    trace.iters.push_back(rec);
  }

  RunTrace finish(RunStatus status, const ProxGradStep& last) {
    trace.status = status;
    trace.solution = last.x_bar;
    trace.final_point = last.x;
    trace.final_residual = last.residual_norm();
    trace.final_fbe = last.fbe;
    trace.totals = p_.counts() - start_counts_;
    return std::move(trace);
  }

  RunTrace trace;

private:
  const Problem& p_;
  OracleCounts start_counts_;
  std::chrono::steady_clock::time_point start_;
};

} // namespace zerofpr::detail
