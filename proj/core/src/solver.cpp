#include "psaga/solver.hpp"

#include "psaga/error.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace psaga {

std::string_view to_string(InitMode mode) { return mode == InitMode::zero ? "zero" : "subgradient"; }

InitMode parse_init_mode(std::string_view name) {
  if (name == "zero") return InitMode::zero;
  if (name == "subgradient") return InitMode::subgradient;
  throw argument_error("unknown init mode '" + std::string(name) + "'");
}

Trace run(IncrementalSolver &solver, const RunOptions &options) {
  if (options.epochs < 1) throw argument_error("run: epochs must be >= 1");
  const Problem &problem = solver.problem();
  const std::size_t n = problem.n();
  IndexSampler sampler(n, options.seed);

  auto bad = [&](double f) { return !std::isfinite(f) || f > options.divergence_threshold; };

  Trace trace;
  trace.records.reserve(options.epochs);
  double wall = 0.0;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < n; ++k) solver.step(sampler.next());
    wall += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    EpochRecord rec;
    rec.epoch = epoch;
    rec.wall_seconds = wall;
    const Vector x = solver.iterate();
    rec.objective = objective(problem, x);
    const auto avg = solver.average();
    if (avg) rec.averaged_objective = objective(problem, *avg);
    trace.records.push_back(rec);

    if (options.observer)
      options.observer({epoch, x, avg ? &*avg : nullptr, rec.objective, rec.averaged_objective, wall});

    if (bad(rec.objective) || (avg && bad(rec.averaged_objective))) {
      trace.diverged = true;
      break;
    }
  }
  trace.final_iterate = solver.iterate();
  trace.final_average = solver.average();
  return trace;
}

}  // namespace psaga
