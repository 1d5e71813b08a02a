#ifndef PSAGA_HARNESS_HPP
#define PSAGA_HARNESS_HPP

#include "psaga/baselines.hpp"
#include "psaga/data.hpp"
#include "psaga/point_saga.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psaga {

enum class StepPolicy { theoretical, grid, fixed };

std::string_view to_string(StepPolicy policy);

/// Everything needed to reproduce one experiment. Mirrors the CLI flags; see plan_from_json.
struct ExperimentPlan {
  std::filesystem::path data;
  std::string dataset_name;  ///< defaults to the file stem
  std::map<double, double> label_map;
  LossKind loss = LossKind::logistic;
  std::optional<double> mu;  ///< defaults by dataset name (default_mu)
  std::vector<Method> methods{Method::point_saga, Method::saga, Method::pegasos};
  std::vector<double> fractions{0.05, 0.10, 1.0};
  std::size_t epochs = 20;
  StepPolicy step_policy = StepPolicy::grid;
  int grid_lo = -14;
  int grid_hi = 4;
  double gamma = 0.0;  ///< when step_policy == fixed
  std::vector<std::uint64_t> seeds{0};
  std::uint64_t subsample_seed = 0;
  InitMode init = InitMode::zero;
  Backend backend = Backend::dense;
  double pegasos_t0 = 1.0;
  std::size_t fstar_epochs = 500;
  std::size_t workers = 0;  ///< 0: hardware concurrency
  bool scale = false;       ///< per-feature scaling to [-1, 1]
  std::filesystem::path out;

  /// Throws argument_error on an inconsistent plan.
  void validate() const;
  double resolved_mu() const;
  std::string resolved_name() const;
  std::vector<int> grid_exponents() const;
};

/// Regularization used for a named dataset: covtype 2e-6, australian 1e-4, mushrooms 1e-4,
/// rcv1 5e-5. Matches on a case-insensitive substring of the name.
std::optional<double> default_mu(std::string_view dataset_name);

/// "A..B" -> (A, B). Throws argument_error on bad syntax or A > B.
std::pair<int, int> parse_grid(std::string_view text);

/// JSON object whose keys mirror the CLI flags: data, dataset_name, label_map, loss, l2,
/// methods, fractions, epochs, grid ("A..B"), gamma, gamma_theoretical, seeds,
/// subsample_seed, init, backend, pegasos_t0, fstar_epochs, workers, scale, out.
ExperimentPlan plan_from_json(std::string_view text);
std::string plan_to_json(const ExperimentPlan &plan);

struct TraceRecord {
  std::string method;
  std::string dataset;
  double fraction = 1.0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  std::size_t epoch = 0;
  double wall_seconds = 0.0;
  double objective = 0.0;
  double suboptimality = 0.0;
  std::string iterate_kind;  ///< "last" or "averaged"
};

inline constexpr std::string_view kCsvHeader =
    "method,dataset,fraction,seed,gamma,epoch,wall_seconds,objective,suboptimality,iterate_kind";

/// Header plus one line per record, numbers in shortest round-trip form.
std::string format_csv(const std::vector<TraceRecord> &records);

/// How each method is run inside the harness.
struct MethodSettings {
  InitMode init = InitMode::zero;
  Backend backend = Backend::dense;
  double pegasos_t0 = 1.0;
};

/// Builds the solver for one run. gamma is ignored by Pegasos. Point-SAGA on a hinge
/// problem tracks the averaged iterate.
std::unique_ptr<IncrementalSolver> make_solver(const Problem &problem, Method method, double gamma,
                                               const MethodSettings &settings);

struct RunResult {
  Method method = Method::point_saga;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  Trace trace;
};

struct GridCell {
  int exponent = 0;
  double gamma = 0.0;
  double mean_final_objective = 0.0;  ///< +inf if any seed diverged
  std::size_t diverged = 0;
};

struct GridSelection {
  Method method = Method::point_saga;
  std::vector<GridCell> cells;
  std::optional<std::size_t> selected;  ///< index into cells; empty if every cell diverged
  std::vector<RunResult> runs;          ///< every run, cell-major then seed

  std::optional<double> gamma() const;
};

/// Runs every gamma = 2^e (e in exponents) for every seed and selects the lowest seed-mean
/// objective at the final epoch; ties go to the larger gamma.
GridSelection grid_search(const Problem &problem, Method method, const std::vector<int> &exponents,
                          const std::vector<std::uint64_t> &seeds, std::size_t epochs,
                          const MethodSettings &settings, std::size_t workers = 0);

struct FstarEstimate {
  double value = 0.0;
  double gamma = 0.0;              ///< step of the long Point-SAGA run
  std::size_t long_run_epochs = 0;
  std::string attained_by;          ///< which run produced the minimum
  std::size_t runs_considered = 0;
};

/// min over a long Point-SAGA run at `gamma` and every objective in `runs`.
FstarEstimate estimate_fstar(const Problem &problem, double gamma, std::size_t epochs,
                             const std::vector<RunResult> &runs, const MethodSettings &settings,
                             std::uint64_t seed = 0);

struct ExperimentResult {
  std::vector<TraceRecord> records;
  std::string metadata_json;
  bool any_diverged = false;
};

/// Full protocol on an already-loaded dataset. Does not write files.
ExperimentResult run_experiments(const ExperimentPlan &plan, const Dataset &data);

/// Loads plan.data, runs the protocol, and writes plan.out plus `<out>.meta.json`.
ExperimentResult run_experiments(const ExperimentPlan &plan);

/// Loads the dataset of a plan (label map, raw labels for squared loss, optional scaling).
Dataset load_plan_dataset(const ExperimentPlan &plan);

/// f* per fraction without the comparison runs: grid search for Point-SAGA (when the plan
/// uses a grid) followed by the long run. Returns (fraction, estimate) pairs.
std::vector<std::pair<double, FstarEstimate>> estimate_fstar(const ExperimentPlan &plan, const Dataset &data);

}  // namespace psaga

#endif
