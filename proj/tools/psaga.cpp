// psaga: experiment runner and diagnostics front end.
//
//   psaga run   --data FILE --loss logistic --l2 1e-4 --methods point-saga,saga,pegasos
//               --fractions 0.05,0.1,1 --epochs 20 --grid -14..4 --seeds 0,1,2 --out trace.csv
//   psaga fstar --data FILE --loss logistic --l2 1e-4
//   psaga check [--only descent,moreau]

#include "psaga/diagnostics.hpp"
#include "psaga/error.hpp"
#include "psaga/harness.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace {

using namespace psaga;

struct PlanFlags {
  std::string config;
  std::string data;
  std::string dataset_name;
  std::string label_map;
  std::string loss;
  double l2 = 0.0;
  std::string methods;
  std::string fractions;
  std::size_t epochs = 0;
  std::string grid;
  double gamma = 0.0;
  bool gamma_theoretical = false;
  std::string seeds;
  std::uint64_t subsample_seed = 0;
  std::string init;
  std::string backend;
  double pegasos_t0 = 1.0;
  std::size_t fstar_epochs = 0;
  std::size_t workers = 0;
  bool scale = false;
  std::string out;
};

std::vector<std::string> split(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void add_plan_options(CLI::App *cmd, PlanFlags &f) {
  cmd->add_option("--config", f.config, "JSON file with the same keys as the flags; flags override it");
  cmd->add_option("--data", f.data, "LIBSVM file (.gz accepted)");
  cmd->add_option("--dataset-name", f.dataset_name, "name used in the CSV (default: file stem)");
  cmd->add_option("--label-map", f.label_map, "raw:mapped pairs, e.g. 1:1,2:-1");
  cmd->add_option("--loss", f.loss, "hinge | logistic | squared");
  cmd->add_option("--l2", f.l2, "regularization mu (default by dataset name)");
  cmd->add_option("--methods", f.methods, "comma list of point-saga, saga, pegasos");
  cmd->add_option("--fractions", f.fractions, "comma list in (0, 1]");
  cmd->add_option("--epochs", f.epochs, "epochs per run");
  auto *grid = cmd->add_option("--grid", f.grid, "step-size grid 2^A..2^B, written A..B");
  auto *gamma = cmd->add_option("--gamma", f.gamma, "fixed step size");
  auto *theo = cmd->add_flag("--gamma-theoretical", f.gamma_theoretical, "theoretical step size");
  grid->excludes(gamma)->excludes(theo);
  gamma->excludes(theo);
  cmd->add_option("--seeds", f.seeds, "comma list of sampling seeds");
  cmd->add_option("--subsample-seed", f.subsample_seed, "root seed for the subsets");
  cmd->add_option("--init", f.init, "zero | subgradient");
  cmd->add_option("--backend", f.backend, "dense | lazy");
  cmd->add_option("--pegasos-t0", f.pegasos_t0, "Pegasos schedule offset");
  cmd->add_option("--fstar-epochs", f.fstar_epochs, "length of the long f* run");
  cmd->add_option("--workers", f.workers, "worker threads (0: all cores)");
  cmd->add_flag("--scale", f.scale, "scale each feature to [-1, 1]");
}

ExperimentPlan build_plan(const CLI::App *cmd, const PlanFlags &f) {
  ExperimentPlan p;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw argument_error("cannot read config " + f.config);
    std::stringstream ss;
    ss << in.rdbuf();
    p = plan_from_json(ss.str());
  }
  auto given = [&](const char *name) { return cmd->count(name) > 0; };
  if (given("--data")) p.data = f.data;
  if (given("--dataset-name")) p.dataset_name = f.dataset_name;
  if (given("--label-map")) p.label_map = parse_label_map(f.label_map);
  if (given("--loss")) p.loss = parse_loss(f.loss);
  if (given("--l2")) p.mu = f.l2;
  if (given("--methods")) {
    p.methods.clear();
    for (const auto &m : split(f.methods)) p.methods.push_back(parse_method(m));
  }
  if (given("--fractions")) {
    p.fractions.clear();
    for (const auto &s : split(f.fractions)) {
      double v = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw argument_error("bad fraction '" + s + "'");
      p.fractions.push_back(v);
    }
  }
  if (given("--epochs")) p.epochs = f.epochs;
  if (given("--grid")) {
    std::tie(p.grid_lo, p.grid_hi) = parse_grid(f.grid);
    p.step_policy = StepPolicy::grid;
  }
  if (given("--gamma")) {
    p.gamma = f.gamma;
    p.step_policy = StepPolicy::fixed;
  }
  if (f.gamma_theoretical) p.step_policy = StepPolicy::theoretical;
  if (given("--seeds")) {
    p.seeds.clear();
    for (const auto &s : split(f.seeds)) {
      std::uint64_t v = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw argument_error("bad seed '" + s + "'");
      p.seeds.push_back(v);
    }
  }
  if (given("--subsample-seed")) p.subsample_seed = f.subsample_seed;
  if (given("--init")) p.init = parse_init_mode(f.init);
  if (given("--backend")) p.backend = parse_backend(f.backend);
  if (given("--pegasos-t0")) p.pegasos_t0 = f.pegasos_t0;
  if (given("--fstar-epochs")) p.fstar_epochs = f.fstar_epochs;
  if (given("--workers")) p.workers = f.workers;
  if (f.scale) p.scale = true;
  if (given("--out")) p.out = f.out;
  if (p.data.empty()) throw argument_error("--data is required");
  return p;
}

int cmd_run(const CLI::App *cmd, const PlanFlags &f) {
  const ExperimentPlan plan = build_plan(cmd, f);
  if (plan.out.empty()) throw argument_error("--out is required");
  const ExperimentResult result = run_experiments(plan);
  std::cerr << "wrote " << result.records.size() << " rows to " << plan.out.string() << '\n';
  if (result.any_diverged) std::cerr << "note: some runs diverged; see the metadata sidecar\n";
  return 0;
}

int cmd_fstar(const CLI::App *cmd, const PlanFlags &f) {
  const ExperimentPlan plan = build_plan(cmd, f);
  const Dataset data = load_plan_dataset(plan);
  std::cout.precision(17);
  for (const auto &[fraction, est] : estimate_fstar(plan, data)) {
    std::cout << "fraction=" << fraction << " fstar=" << est.value << " gamma=" << est.gamma
              << " epochs=" << est.long_run_epochs << " runs=" << est.runs_considered << " attained_by=\""
              << est.attained_by << "\"\n";
  }
  return 0;
}

int cmd_check(const std::string &only, std::uint64_t seed) {
  std::set<std::string> selected;
  for (const auto &s : split(only)) selected.insert(s);
  auto want = [&](const std::string &name) { return selected.empty() || selected.count(name) > 0; };

  std::vector<CheckReport> reports;
  if (want("prox_oracle")) reports.push_back(check_prox_oracle(10000, seed));
  if (want("newton_iterations")) reports.push_back(check_newton_iterations(10000, seed));
  if (want("operator_inequalities")) reports.push_back(check_operator_inequalities(10000, seed));
  if (want("moreau")) reports.push_back(check_moreau(known_conjugate_pairs(), 100, seed));
  if (want("descent") || want("chained_rate")) {
    const Problem q = make_conditioned_quadratic(10, 5, 100.0, seed);
    const ReferenceSolution ref = solve_reference(q);
    if (want("descent")) reports.push_back(check_descent(q, ref, 2000, seed));
    if (want("chained_rate"))
      reports.push_back(check_chained_rate(q, ref, Vector::Zero(static_cast<Eigen::Index>(q.d())), {100, 500, 1000},
                                           20, seed));
  }
  if (want("nonsmooth_rate")) {
    SyntheticOptions o;
    o.n = 1000;
    o.d = 100;
    o.loss = LossKind::hinge;
    o.mu = 1e-2;
    o.unit_rows = true;
    o.seed = seed;
    const Problem h = make_synthetic(o);
    const ReferenceSolution ref = solve_reference(h);
    reports.push_back(check_nonsmooth_rate(h, ref, {1000, 2000, 4000}, 10, seed));
  }
  if (reports.empty()) throw argument_error("--only selected no known check");

  bool all = true;
  for (const CheckReport &r : reports) {
    std::cout << r.text();
    all = all && r.pass;
  }
  std::cout << (all ? "all checks passed" : "some checks FAILED") << '\n';
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Point-SAGA experiments and diagnostics"};
  app.require_subcommand(1);

  PlanFlags run_flags;
  auto *run = app.add_subcommand("run", "run the comparison protocol and write a CSV trace");
  add_plan_options(run, run_flags);
  run->add_option("--out", run_flags.out, "CSV output path (metadata goes to OUT.meta.json)");

  PlanFlags fstar_flags;
  auto *fstar = app.add_subcommand("fstar", "estimate f* for each subset");
  add_plan_options(fstar, fstar_flags);

  std::string only;
  std::uint64_t check_seed = 0;
  auto *check = app.add_subcommand("check", "run the diagnostics suite; exit 0 only if every check passes");
  check->add_option("--only", only,
                    "comma list of: prox_oracle, newton_iterations, operator_inequalities, moreau, descent, "
                    "chained_rate, nonsmooth_rate");
  check->add_option("--seed", check_seed, "root seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(run, run_flags);
    if (*fstar) return cmd_fstar(fstar, fstar_flags);
    if (*check) return cmd_check(only, check_seed);
  } catch (const std::exception &e) {
    std::cerr << "psaga: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
