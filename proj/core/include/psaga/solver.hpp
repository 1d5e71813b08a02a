#ifndef PSAGA_SOLVER_HPP
#define PSAGA_SOLVER_HPP

#include "psaga/problem.hpp"
#include "psaga/rng.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace psaga {

enum class InitMode { zero, subgradient };

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view name);

/// Common surface of the incremental methods (Point-SAGA backends and the baselines).
/// A solver instance is confined to one thread; the Problem it references is shared.
class IncrementalSolver {
 public:
  virtual ~IncrementalSolver() = default;

  /// One update using example j (0 <= j < n).
  virtual void step(std::size_t j) = 0;
  /// Current iterate, materialized.
  virtual Vector iterate() const = 0;
  /// Running average of the iterates x^1..x^k, if the solver tracks it.
  virtual std::optional<Vector> average() const { return std::nullopt; }
  virtual std::uint64_t steps() const = 0;
  virtual const Problem &problem() const = 0;
  virtual std::string_view name() const = 0;
};

/// Uniform i.i.d. index stream over [0, n), with replacement.
class IndexSampler {
 public:
  IndexSampler(std::size_t n, std::uint64_t seed) : n_(n), rng_(seed) {}
  std::size_t next() { return static_cast<std::size_t>(rng_.bounded(n_)); }

 private:
  std::size_t n_;
  Rng rng_;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double wall_seconds = 0.0;  ///< cumulative time spent stepping, excluding evaluation
  double objective = 0.0;     ///< f at the last iterate
  double averaged_objective = std::numeric_limits<double>::quiet_NaN();
};

struct EpochObservation {
  std::size_t epoch;
  const Vector &x;
  const Vector *average;  ///< null unless the solver averages
  double objective;
  double averaged_objective;
  double wall_seconds;
};

using EpochObserver = std::function<void(const EpochObservation &)>;

struct RunOptions {
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  /// Objective above this (or non-finite) marks the run diverged and stops it.
  double divergence_threshold = 1e12;
  EpochObserver observer;
};

struct Trace {
  std::vector<EpochRecord> records;
  bool diverged = false;
  Vector final_iterate;
  std::optional<Vector> final_average;

  double final_objective() const {
    return records.empty() ? std::numeric_limits<double>::quiet_NaN() : records.back().objective;
  }
};

/// Runs epochs * n steps with indices from IndexSampler(n, seed), evaluating f at each
/// epoch boundary. Identical seeds give identical traces (wall time aside).
Trace run(IncrementalSolver &solver, const RunOptions &options);

}  // namespace psaga

#endif
