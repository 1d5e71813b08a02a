#ifndef PSAGA_POINT_SAGA_HPP
#define PSAGA_POINT_SAGA_HPP

#include "psaga/losses.hpp"
#include "psaga/solver.hpp"
#include "psaga/step_size.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <vector>

namespace psaga {

/// What a table entry holds.
///   full:      g_j = (z_j - x+) / gamma, the subgradient of the regularized term F_j at x+.
///              This is the update exactly as written; the entry has a dense mu x+ part.
///   loss_only: g_j = l'(c) X_j, the loss part only, with the L2 term handled entirely by
///              the folded prox. One scalar per example suffices. For mu == 0 the two
///              coincide; for mu > 0 this is a different (fixed-point preserving) method.
enum class TableStorage { full, loss_only };

std::string_view to_string(TableStorage storage);

enum class Backend { dense, lazy };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);

/// Dense per-example gradient table with a cached mean.
class GradientTable {
 public:
  GradientTable() = default;
  GradientTable(std::size_t n, std::size_t d);

  std::size_t n() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
  auto entry(std::size_t i) const { return entries_.col(static_cast<Eigen::Index>(i)); }
  const Vector &mean() const noexcept { return mean_; }
  const Eigen::MatrixXd &entries() const noexcept { return entries_; }

  /// Replaces entry i and moves the cached mean by (g - g_old) / n.
  void set(std::size_t i, const Vector &g);
  /// Overwrites every entry and recomputes the mean from scratch.
  void assign(const Eigen::MatrixXd &entries);

  Vector recomputed_mean() const;
  /// |cached mean - recomputed mean|.
  double mean_drift() const;
  void refresh_mean() { mean_ = recomputed_mean(); }

 private:
  Eigen::MatrixXd entries_;  // d x n, column i is g_i
  Vector mean_;
};

struct PointSagaOptions {
  double gamma = 0.0;
  InitMode init = InitMode::zero;
  TableStorage storage = TableStorage::full;
  bool track_average = false;
  Backend backend = Backend::dense;
  std::optional<Vector> x0;  ///< defaults to zero
  NewtonOptions newton;
};

/// Reference backend: dense iterate and dense table, a direct transcription of
///   z = x + gamma (g_j - mean g);  x+ = prox_j^gamma(z);  g_j <- (z - x+) / gamma.
class PointSaga final : public IncrementalSolver {
 public:
  /// Result of a step that has not been committed.
  struct Proposal {
    Vector z;
    Vector x_next;
    Vector g_next;
    ProxResult scalar;
  };

  PointSaga(const Problem &problem, PointSagaOptions options);

  void step(std::size_t j) override;
  Proposal propose(std::size_t j) const;
  void commit(std::size_t j, Proposal proposal);

  Vector iterate() const override { return x_; }
  std::optional<Vector> average() const override;
  std::uint64_t steps() const override { return steps_; }
  const Problem &problem() const override { return problem_; }
  std::string_view name() const override { return "point-saga"; }

  const Vector &x() const noexcept { return x_; }
  const GradientTable &table() const noexcept { return table_; }
  GradientTable &table() noexcept { return table_; }
  double gamma() const noexcept { return options_.gamma; }
  const PointSagaOptions &options() const noexcept { return options_; }

  /// Replace the state wholesale (diagnostics start from arbitrary states).
  void set_state(const Vector &x, const Eigen::MatrixXd &table_entries);

 private:
  Problem problem_;
  PointSagaOptions options_;
  Vector x_;
  GradientTable table_;
  std::uint64_t steps_ = 0;
  Vector average_;
};

/// Sparse-optimized backend. Stores one scalar per example (loss_only storage) and keeps
/// x implicitly as scale * w plus per-coordinate pending drift: a coordinate untouched for
/// m steps evolves as x_d <- rho^m x_d - gamma gbar_d rho (1 - rho^m) / (1 - rho), since
/// gbar_d only changes when coordinate d is in the support of the chosen row. A step costs
/// O(nnz(X_j)).
///
/// Matches PointSaga with TableStorage::loss_only (for any mu), and therefore the full
/// storage update when mu == 0. Does not track averages.
class LazyPointSaga final : public IncrementalSolver {
 public:
  /// options.storage must be loss_only unless mu == 0; track_average must be false.
  LazyPointSaga(const Problem &problem, PointSagaOptions options);

  void step(std::size_t j) override;
  Vector iterate() const override;
  std::uint64_t steps() const override { return steps_; }
  const Problem &problem() const override { return problem_; }
  std::string_view name() const override { return "point-saga-lazy"; }

  /// Bring every coordinate up to date and fold the scale into w.
  void flush();
  /// Per-example scalar coefficients nu_i (entry g_i = nu_i X_i).
  const std::vector<double> &coefficients() const noexcept { return coef_; }
  const Vector &mean_gradient() const noexcept { return gbar_; }

 private:
  double drift_factor(std::uint64_t m) const;
  double current(std::size_t d) const;

  Problem problem_;
  PointSagaOptions options_;
  double rho_;
  Vector w_;
  double scale_ = 1.0;
  std::vector<std::uint64_t> last_;
  Vector gbar_;
  std::vector<double> coef_;
  std::uint64_t steps_ = 0;
  std::vector<double> z_;  // scratch, support-sized
};

/// Constructs the backend named in options.backend.
std::unique_ptr<IncrementalSolver> make_point_saga(const Problem &problem, const PointSagaOptions &options);

/// Point-SAGA over epochs with the given step-size plan.
Trace run_point_saga(const Problem &problem, const StepSizePlan &plan, PointSagaOptions options,
                     const RunOptions &run_options);

/// Averaged non-smooth mode: gamma = R / (B sqrt(n)), records f at the last and the
/// averaged iterate.
Trace run_nonsmooth(const Problem &problem, std::size_t epochs, double R, double B, std::uint64_t seed,
                    InitMode init = InitMode::zero);

}  // namespace psaga

#endif
