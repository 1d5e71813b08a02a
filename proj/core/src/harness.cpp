#include "psaga/harness.hpp"

#include "psaga/error.hpp"
#include "psaga/rng.hpp"
#include "psaga/step_size.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>

namespace psaga {

using json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t resolve_workers(std::size_t workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, count) on up to `workers` threads. Exceptions are rethrown.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)> &fn) {
  workers = std::min(resolve_workers(workers), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto &t : threads) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

double final_objective(const Trace &trace) {
  if (trace.diverged || trace.records.empty()) return kInf;
  return trace.final_objective();
}

Trace run_one(const Problem &problem, Method method, double gamma, const MethodSettings &settings,
              std::size_t epochs, std::uint64_t seed) {
  auto solver = make_solver(problem, method, gamma, settings);
  RunOptions options;
  options.epochs = epochs;
  options.seed = seed;
  return run(*solver, options);
}

double pegasos_first_step(double mu, double t0) { return 1.0 / (mu * (1.0 + t0)); }

}  // namespace

std::string_view to_string(StepPolicy policy) {
  switch (policy) {
    case StepPolicy::theoretical:
      return "theoretical";
    case StepPolicy::grid:
      return "grid";
    case StepPolicy::fixed:
      return "fixed";
  }
  return "unknown";
}

std::optional<double> default_mu(std::string_view dataset_name) {
  const std::string name = lower(dataset_name);
  if (name.find("covtype") != std::string::npos) return 2e-6;
  if (name.find("australian") != std::string::npos) return 1e-4;
  if (name.find("mushroom") != std::string::npos) return 1e-4;
  if (name.find("rcv1") != std::string::npos) return 5e-5;
  return std::nullopt;
}

std::pair<int, int> parse_grid(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) throw argument_error("grid must look like A..B, got '" + std::string(text) + "'");
  auto parse_int = [&](std::string_view s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw argument_error("grid bound '" + std::string(s) + "' is not an integer");
    return v;
  };
  const int lo = parse_int(text.substr(0, dots));
  const int hi = parse_int(text.substr(dots + 2));
  if (lo > hi) throw argument_error("grid bounds must satisfy A <= B");
  return {lo, hi};
}

// ------------------------------------------------------------------ plan

void ExperimentPlan::validate() const {
  if (methods.empty()) throw argument_error("plan: no methods");
  if (fractions.empty()) throw argument_error("plan: no fractions");
  for (double f : fractions)
    if (!(f > 0.0) || f > 1.0) throw argument_error("plan: fractions must lie in (0, 1]");
  if (epochs < 1) throw argument_error("plan: epochs must be >= 1");
  if (seeds.empty()) throw argument_error("plan: at least one seed is required");
  if (grid_lo > grid_hi) throw argument_error("plan: grid bounds must satisfy A <= B");
  if (step_policy == StepPolicy::fixed && !(gamma > 0.0 && std::isfinite(gamma)))
    throw argument_error("plan: --gamma must be positive");
  const double m = resolved_mu();
  if (!(m >= 0.0)) throw argument_error("plan: mu must be >= 0");
  for (Method method : methods) {
    if (method == Method::saga && loss == LossKind::hinge)
      throw argument_error("plan: saga needs a smooth loss; drop it for hinge");
    if (method == Method::pegasos && !(m > 0.0)) throw argument_error("plan: pegasos needs mu > 0");
  }
  if (step_policy == StepPolicy::theoretical && loss == LossKind::hinge)
    throw argument_error("plan: hinge has no theoretical step size; use a grid or --gamma");
  if (backend == Backend::lazy && loss == LossKind::hinge)
    throw argument_error("plan: the lazy backend does not average iterates; use the dense backend for hinge");
  if (!(pegasos_t0 >= 0.0)) throw argument_error("plan: pegasos_t0 must be >= 0");
  if (fstar_epochs < 1) throw argument_error("plan: fstar_epochs must be >= 1");
}

double ExperimentPlan::resolved_mu() const {
  if (mu) return *mu;
  if (auto m = default_mu(resolved_name())) return *m;
  throw argument_error("plan: no --l2 given and no default for dataset '" + resolved_name() + "'");
}

std::string ExperimentPlan::resolved_name() const {
  if (!dataset_name.empty()) return dataset_name;
  std::filesystem::path p = data.filename();
  while (p.has_extension()) p = p.stem();
  return p.string();
}

std::vector<int> ExperimentPlan::grid_exponents() const {
  std::vector<int> out;
  for (int e = grid_lo; e <= grid_hi; ++e) out.push_back(e);
  return out;
}

ExperimentPlan plan_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw argument_error(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw argument_error("config: top level must be an object");

  ExperimentPlan p;
  auto str_list = [](const json &v) {
    std::vector<std::string> out;
    if (v.is_array()) {
      for (const auto &x : v) out.push_back(x.get<std::string>());
    } else {
      std::stringstream ss(v.get<std::string>());
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    }
    return out;
  };
  try {
    for (const auto &[key, v] : j.items()) {
      if (key == "data") p.data = v.get<std::string>();
      else if (key == "dataset_name") p.dataset_name = v.get<std::string>();
      else if (key == "label_map") p.label_map = parse_label_map(v.get<std::string>());
      else if (key == "loss") p.loss = parse_loss(v.get<std::string>());
      else if (key == "l2") p.mu = v.get<double>();
      else if (key == "methods") {
        p.methods.clear();
        for (const auto &m : str_list(v)) p.methods.push_back(parse_method(m));
      } else if (key == "fractions") {
        p.fractions.clear();
        if (v.is_array())
          for (const auto &x : v) p.fractions.push_back(x.get<double>());
        else
          for (const auto &s : str_list(v)) p.fractions.push_back(std::stod(s));
      } else if (key == "epochs") p.epochs = v.get<std::size_t>();
      else if (key == "grid") {
        std::tie(p.grid_lo, p.grid_hi) = parse_grid(v.get<std::string>());
        p.step_policy = StepPolicy::grid;
      } else if (key == "gamma") {
        p.gamma = v.get<double>();
        p.step_policy = StepPolicy::fixed;
      } else if (key == "gamma_theoretical") {
        if (v.get<bool>()) p.step_policy = StepPolicy::theoretical;
      } else if (key == "seeds") {
        p.seeds.clear();
        if (v.is_array())
          for (const auto &x : v) p.seeds.push_back(x.get<std::uint64_t>());
        else
          for (const auto &s : str_list(v)) p.seeds.push_back(std::stoull(s));
      } else if (key == "subsample_seed") p.subsample_seed = v.get<std::uint64_t>();
      else if (key == "init") p.init = parse_init_mode(v.get<std::string>());
      else if (key == "backend") p.backend = parse_backend(v.get<std::string>());
      else if (key == "pegasos_t0") p.pegasos_t0 = v.get<double>();
      else if (key == "fstar_epochs") p.fstar_epochs = v.get<std::size_t>();
      else if (key == "workers") p.workers = v.get<std::size_t>();
      else if (key == "scale") p.scale = v.get<bool>();
      else if (key == "out") p.out = v.get<std::string>();
      else throw argument_error("config: unknown key '" + key + "'");
    }
  } catch (const json::exception &e) {
    throw argument_error(std::string("config: ") + e.what());
  }
  return p;
}

std::string plan_to_json(const ExperimentPlan &p) {
  json j;
  j["data"] = p.data.string();
  j["dataset_name"] = p.resolved_name();
  j["label_map"] = format_label_map(p.label_map);
  j["loss"] = std::string(to_string(p.loss));
  if (p.mu) j["l2"] = *p.mu;
  json methods = json::array();
  for (Method m : p.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = methods;
  j["fractions"] = p.fractions;
  j["epochs"] = p.epochs;
  switch (p.step_policy) {
    case StepPolicy::grid:
      j["grid"] = std::to_string(p.grid_lo) + ".." + std::to_string(p.grid_hi);
      break;
    case StepPolicy::fixed:
      j["gamma"] = p.gamma;
      break;
    case StepPolicy::theoretical:
      j["gamma_theoretical"] = true;
      break;
  }
  j["seeds"] = p.seeds;
  j["subsample_seed"] = p.subsample_seed;
  j["init"] = std::string(to_string(p.init));
  j["backend"] = std::string(to_string(p.backend));
  j["pegasos_t0"] = p.pegasos_t0;
  j["fstar_epochs"] = p.fstar_epochs;
  j["workers"] = p.workers;
  j["scale"] = p.scale;
  j["out"] = p.out.string();
  return j.dump(2);
}

// ------------------------------------------------------------------ CSV

std::string format_csv(const std::vector<TraceRecord> &records) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const TraceRecord &r : records) {
    out += r.method;
    out += ',';
    out += r.dataset;
    out += ',';
    out += format_double(r.fraction);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += format_double(r.gamma);
    out += ',';
    out += std::to_string(r.epoch);
    out += ',';
    out += format_double(r.wall_seconds);
    out += ',';
    out += format_double(r.objective);
    out += ',';
    out += format_double(r.suboptimality);
    out += ',';
    out += r.iterate_kind;
    out += '\n';
  }
  return out;
}

// ------------------------------------------------------------------ runs

std::unique_ptr<IncrementalSolver> make_solver(const Problem &problem, Method method, double gamma,
                                               const MethodSettings &settings) {
  switch (method) {
    case Method::point_saga: {
      PointSagaOptions options;
      options.gamma = gamma;
      options.init = settings.init;
      options.backend = settings.backend;
      options.storage = settings.backend == Backend::lazy ? TableStorage::loss_only : TableStorage::full;
      options.track_average = problem.loss == LossKind::hinge;
      return make_point_saga(problem, options);
    }
    case Method::saga:
      return std::make_unique<Saga>(problem, gamma, settings.init);
    case Method::pegasos:
      return std::make_unique<Pegasos>(problem, settings.pegasos_t0, problem.loss == LossKind::hinge);
  }
  throw argument_error("make_solver: unknown method");
}

std::optional<double> GridSelection::gamma() const {
  if (!selected) return std::nullopt;
  return cells[*selected].gamma;
}

GridSelection grid_search(const Problem &problem, Method method, const std::vector<int> &exponents,
                          const std::vector<std::uint64_t> &seeds, std::size_t epochs,
                          const MethodSettings &settings, std::size_t workers) {
  if (exponents.empty()) throw argument_error("grid_search: empty grid");
  if (seeds.empty()) throw argument_error("grid_search: no seeds");
  GridSelection sel;
  sel.method = method;
  const std::size_t per_cell = seeds.size();
  sel.runs.resize(exponents.size() * per_cell);
  parallel_for(sel.runs.size(), workers, [&](std::size_t k) {
    const int e = exponents[k / per_cell];
    RunResult &r = sel.runs[k];
    r.method = method;
    r.gamma = std::ldexp(1.0, e);
    r.seed = seeds[k % per_cell];
    r.trace = run_one(problem, method, r.gamma, settings, epochs, r.seed);
  });

  for (std::size_t c = 0; c < exponents.size(); ++c) {
    GridCell cell;
    cell.exponent = exponents[c];
    cell.gamma = std::ldexp(1.0, exponents[c]);
    double sum = 0.0;
    for (std::size_t s = 0; s < per_cell; ++s) {
      const double f = final_objective(sel.runs[c * per_cell + s].trace);
      if (!std::isfinite(f)) ++cell.diverged;
      sum += f;
    }
    cell.mean_final_objective = cell.diverged > 0 ? kInf : sum / static_cast<double>(per_cell);
    sel.cells.push_back(cell);
  }
  for (std::size_t c = 0; c < sel.cells.size(); ++c) {
    const double f = sel.cells[c].mean_final_objective;
    if (!std::isfinite(f)) continue;
    if (!sel.selected) {
      sel.selected = c;
      continue;
    }
    const GridCell &best = sel.cells[*sel.selected];
    if (f < best.mean_final_objective || (f == best.mean_final_objective && sel.cells[c].gamma > best.gamma))
      sel.selected = c;
  }
  return sel;
}

FstarEstimate estimate_fstar(const Problem &problem, double gamma, std::size_t epochs,
                             const std::vector<RunResult> &runs, const MethodSettings &settings,
                             std::uint64_t seed) {
  FstarEstimate est;
  est.gamma = gamma;
  est.long_run_epochs = epochs;
  est.value = kInf;
  auto consider = [&](double f, const std::string &who) {
    if (std::isfinite(f) && f < est.value) {
      est.value = f;
      est.attained_by = who;
    }
  };
  MethodSettings long_settings = settings;
  const Trace long_run = run_one(problem, Method::point_saga, gamma, long_settings, epochs, seed);
  ++est.runs_considered;
  for (const EpochRecord &rec : long_run.records) {
    consider(rec.objective, "long point-saga run");
    consider(rec.averaged_objective, "long point-saga run (averaged)");
  }
  for (const RunResult &r : runs) {
    ++est.runs_considered;
    const std::string who = std::string(to_string(r.method)) + " gamma=" + format_double(r.gamma) +
                            " seed=" + std::to_string(r.seed);
    for (const EpochRecord &rec : r.trace.records) {
      consider(rec.objective, who);
      consider(rec.averaged_objective, who + " (averaged)");
    }
  }
  return est;
}

Dataset load_plan_dataset(const ExperimentPlan &plan) {
  ParseOptions opts;
  opts.label_map = plan.label_map;
  opts.raw_labels = plan.loss == LossKind::squared && plan.label_map.empty();
  Dataset ds = read_libsvm(plan.data, opts);
  if (plan.scale) ds = scale_features(ds);
  return ds;
}

namespace {

struct FractionSetup {
  double fraction;
  std::uint64_t subsample_seed;
  Problem problem;
};

std::vector<FractionSetup> setup_fractions(const ExperimentPlan &plan, const Dataset &data) {
  std::vector<FractionSetup> out;
  const double mu = plan.resolved_mu();
  for (std::size_t fi = 0; fi < plan.fractions.size(); ++fi) {
    const double f = plan.fractions[fi];
    const std::uint64_t s = derive_seed(plan.subsample_seed, fi);
    auto sub = std::make_shared<const Dataset>(subsample(data, f, s));
    out.push_back({f, s, derive_constants(std::move(sub), plan.loss, mu)});
  }
  return out;
}

MethodSettings settings_of(const ExperimentPlan &plan) {
  MethodSettings s;
  s.init = plan.init;
  s.backend = plan.backend;
  s.pegasos_t0 = plan.pegasos_t0;
  return s;
}

double policy_gamma(const ExperimentPlan &plan, const Problem &problem, Method method) {
  if (plan.step_policy == StepPolicy::fixed) return plan.gamma;
  if (method == Method::saga) return 1.0 / (3.0 * problem.smoothness);
  return step_size_default(problem.n(), problem.smoothness, problem.mu);
}

json grid_json(const GridSelection &sel) {
  json cells = json::array();
  for (const GridCell &c : sel.cells) {
    json cj;
    cj["exponent"] = c.exponent;
    cj["gamma"] = c.gamma;
    cj["mean_final_objective"] = std::isfinite(c.mean_final_objective) ? json(c.mean_final_objective) : json(nullptr);
    cj["diverged_runs"] = c.diverged;
    cells.push_back(cj);
  }
  return cells;
}

json fstar_json(const FstarEstimate &e) {
  json j;
  j["value"] = e.value;
  j["long_run_gamma"] = e.gamma;
  j["long_run_epochs"] = e.long_run_epochs;
  j["attained_by"] = e.attained_by;
  j["runs_considered"] = e.runs_considered;
  return j;
}

// gamma for the long f* run, plus any grid runs made only to find it.
std::pair<double, std::vector<RunResult>> fstar_gamma(const ExperimentPlan &plan, const Problem &problem,
                                                      const std::optional<GridSelection> &psaga_grid,
                                                      const MethodSettings &settings) {
  if (plan.step_policy != StepPolicy::grid) return {policy_gamma(plan, problem, Method::point_saga), {}};
  if (psaga_grid && psaga_grid->gamma()) return {*psaga_grid->gamma(), {}};
  if (psaga_grid) throw numerical_error("f*: every Point-SAGA grid cell diverged");
  GridSelection sel =
      grid_search(problem, Method::point_saga, plan.grid_exponents(), plan.seeds, plan.epochs, settings, plan.workers);
  if (!sel.gamma()) throw numerical_error("f*: every Point-SAGA grid cell diverged");
  return {*sel.gamma(), std::move(sel.runs)};
}

}  // namespace

ExperimentResult run_experiments(const ExperimentPlan &plan, const Dataset &data) {
  plan.validate();
  const std::string name = plan.resolved_name();
  const MethodSettings settings = settings_of(plan);
  ExperimentResult result;

  json meta;
  meta["dataset"] = name;
  meta["data_path"] = plan.data.string();
  meta["n_full"] = data.n();
  meta["d"] = data.d();
  meta["loss"] = std::string(to_string(plan.loss));
  meta["mu"] = plan.resolved_mu();
  meta["mu_source"] = plan.mu ? "plan" : "dataset default";
  meta["label_map"] = format_label_map(plan.label_map);
  meta["init"] = std::string(to_string(plan.init));
  meta["backend"] = std::string(to_string(plan.backend));
  meta["table_storage"] =
      std::string(to_string(plan.backend == Backend::lazy ? TableStorage::loss_only : TableStorage::full));
  meta["rng"] = std::string(Rng::algorithm);
  meta["seeds"] = plan.seeds;
  meta["subsample_seed"] = plan.subsample_seed;
  meta["epochs"] = plan.epochs;
  meta["step_policy"] = std::string(to_string(plan.step_policy));
  if (plan.step_policy == StepPolicy::grid) meta["grid"] = {plan.grid_lo, plan.grid_hi};
  meta["preprocessing"] = plan.scale ? "per-feature scaling to [-1, 1]" : "none; file used as given";
  meta["selection_rule"] = "lowest seed-mean objective at the final epoch; ties to the larger gamma";
  meta["pegasos"] = {{"t0", plan.pegasos_t0},
                     {"variant", "projection-free SGD, eta_t = 1/(mu (t + t0)), t = 1, 2, ..."},
                     {"gamma_column", "eta_1 = 1/(mu (1 + t0))"}};
  meta["saga_theoretical_gamma"] = "1/(3L)";
  meta["hinge_iterates"] = "point-saga and pegasos rows carry both last and averaged iterates";

  json cells = json::array();
  for (const FractionSetup &fs : setup_fractions(plan, data)) {
    const Problem &problem = fs.problem;
    std::vector<RunResult> all_runs;
    std::vector<RunResult> chosen;
    std::optional<GridSelection> psaga_grid;

    for (Method method : plan.methods) {
      json cj;
      cj["method"] = std::string(to_string(method));
      cj["fraction"] = fs.fraction;
      cj["n"] = problem.n();
      cj["L"] = problem.smooth() ? json(problem.smoothness) : json(nullptr);
      cj["subsample_seed"] = fs.subsample_seed;

      if (method == Method::pegasos || plan.step_policy != StepPolicy::grid) {
        const double gamma = method == Method::pegasos ? 0.0 : policy_gamma(plan, problem, method);
        std::vector<RunResult> runs(plan.seeds.size());
        parallel_for(runs.size(), plan.workers, [&](std::size_t k) {
          runs[k].method = method;
          runs[k].gamma = method == Method::pegasos ? pegasos_first_step(problem.mu, plan.pegasos_t0) : gamma;
          runs[k].seed = plan.seeds[k];
          runs[k].trace = run_one(problem, method, gamma, settings, plan.epochs, runs[k].seed);
        });
        cj["gamma"] = runs.front().gamma;
        cj["gamma_source"] = method == Method::pegasos ? "schedule" : std::string(to_string(plan.step_policy));
        all_runs.insert(all_runs.end(), runs.begin(), runs.end());
        chosen.insert(chosen.end(), runs.begin(), runs.end());
      } else {
        GridSelection sel = grid_search(problem, method, plan.grid_exponents(), plan.seeds, plan.epochs, settings,
                                        plan.workers);
        cj["grid"] = grid_json(sel);
        if (sel.selected) {
          cj["gamma"] = sel.cells[*sel.selected].gamma;
          cj["gamma_source"] = "grid:2^" + std::to_string(sel.cells[*sel.selected].exponent);
          const std::size_t per = plan.seeds.size();
          for (std::size_t s = 0; s < per; ++s) chosen.push_back(sel.runs[*sel.selected * per + s]);
        } else {
          cj["gamma"] = nullptr;
          cj["gamma_source"] = "none: every grid cell diverged";
          result.any_diverged = true;
        }
        all_runs.insert(all_runs.end(), sel.runs.begin(), sel.runs.end());
        if (method == Method::point_saga) psaga_grid = std::move(sel);
      }
      cells.push_back(cj);
    }

    auto [gamma_star, extra] = fstar_gamma(plan, problem, psaga_grid, settings);
    all_runs.insert(all_runs.end(), extra.begin(), extra.end());
    const FstarEstimate fstar =
        estimate_fstar(problem, gamma_star, plan.fstar_epochs, all_runs, settings, plan.seeds.front());
    json fj = fstar_json(fstar);
    fj["fraction"] = fs.fraction;
    meta["fstar"].push_back(fj);

    for (const RunResult &r : chosen) {
      if (r.trace.diverged) result.any_diverged = true;
      for (const EpochRecord &rec : r.trace.records) {
        TraceRecord tr;
        tr.method = std::string(to_string(r.method));
        tr.dataset = name;
        tr.fraction = fs.fraction;
        tr.seed = r.seed;
        tr.gamma = r.gamma;
        tr.epoch = rec.epoch;
        tr.wall_seconds = rec.wall_seconds;
        tr.objective = rec.objective;
        tr.suboptimality = rec.objective - fstar.value;
        tr.iterate_kind = "last";
        result.records.push_back(tr);
        if (!std::isnan(rec.averaged_objective)) {
          tr.objective = rec.averaged_objective;
          tr.suboptimality = rec.averaged_objective - fstar.value;
          tr.iterate_kind = "averaged";
          result.records.push_back(tr);
        }
      }
      if (r.trace.diverged) {
        json dj;
        dj["method"] = std::string(to_string(r.method));
        dj["fraction"] = fs.fraction;
        dj["seed"] = r.seed;
        dj["gamma"] = r.gamma;
        dj["epochs_completed"] = r.trace.records.size();
        meta["diverged"].push_back(dj);
      }
    }
  }
  meta["cells"] = cells;
  meta["plan"] = json::parse(plan_to_json(plan));

  std::stable_sort(result.records.begin(), result.records.end(), [](const TraceRecord &a, const TraceRecord &b) {
    return std::tie(a.method, a.fraction, a.seed, a.gamma, a.epoch, a.iterate_kind) <
           std::tie(b.method, b.fraction, b.seed, b.gamma, b.epoch, b.iterate_kind);
  });
  // "averaged" sorts before "last"; put the last iterate first within an epoch.
  for (std::size_t i = 0; i + 1 < result.records.size(); ++i) {
    TraceRecord &a = result.records[i];
    TraceRecord &b = result.records[i + 1];
    if (a.iterate_kind == "averaged" && b.iterate_kind == "last" && a.method == b.method &&
        a.fraction == b.fraction && a.seed == b.seed && a.epoch == b.epoch)
      std::swap(a, b);
  }
  result.metadata_json = meta.dump(2);
  return result;
}

ExperimentResult run_experiments(const ExperimentPlan &plan) {
  plan.validate();
  const Dataset data = load_plan_dataset(plan);
  ExperimentResult result = run_experiments(plan, data);
  if (!plan.out.empty()) {
    std::ofstream csv(plan.out, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + plan.out.string());
    csv << format_csv(result.records);
    std::filesystem::path meta_path = plan.out;
    meta_path += ".meta.json";
    std::ofstream meta(meta_path, std::ios::binary);
    if (!meta) throw std::runtime_error("cannot write " + meta_path.string());
    meta << result.metadata_json << '\n';
  }
  return result;
}

std::vector<std::pair<double, FstarEstimate>> estimate_fstar(const ExperimentPlan &plan, const Dataset &data) {
  plan.validate();
  const MethodSettings settings = settings_of(plan);
  std::vector<std::pair<double, FstarEstimate>> out;
  for (const FractionSetup &fs : setup_fractions(plan, data)) {
    auto [gamma, runs] = fstar_gamma(plan, fs.problem, std::nullopt, settings);
    out.emplace_back(fs.fraction,
                     estimate_fstar(fs.problem, gamma, plan.fstar_epochs, runs, settings, plan.seeds.front()));
  }
  return out;
}

}  // namespace psaga
