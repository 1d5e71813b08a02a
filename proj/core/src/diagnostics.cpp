#include "psaga/diagnostics.hpp"

#include "psaga/error.hpp"
#include "psaga/rng.hpp"
#include "psaga/step_size.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace psaga {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::MatrixXd dense_rows(const Dataset &ds) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ds.n()), static_cast<Eigen::Index>(ds.d()));
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const SparseVec &row = ds.row(i);
    const auto idx = row.indices();
    const auto val = row.values();
    for (std::size_t k = 0; k < row.nnz(); ++k) A(static_cast<Eigen::Index>(i), idx[k]) += val[k];
  }
  return A;
}

Vector dense_labels(const Dataset &ds) {
  Vector y(static_cast<Eigen::Index>(ds.n()));
  for (std::size_t i = 0; i < ds.n(); ++i) y[static_cast<Eigen::Index>(i)] = ds.label(i);
  return y;
}

Vector normal_vector(Rng &rng, std::size_t dim) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = rng.normal();
  return v;
}

double log_uniform(Rng &rng, double lo, double hi) { return std::exp(rng.uniform(std::log(lo), std::log(hi))); }

struct MeanStd {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStd mean_stderr(const std::vector<double> &xs) {
  MeanStd r;
  if (xs.empty()) return r;
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return r;
}

std::string key_suffix(std::size_t k) { return std::to_string(k); }

}  // namespace

// ------------------------------------------------------------------ reports

double CheckReport::get(const std::string &key) const {
  for (const auto &[k, v] : values)
    if (k == key) return v;
  return kNaN;
}

std::string CheckReport::text() const {
  std::ostringstream out;
  out.precision(10);
  out << "[" << (pass ? "PASS" : "FAIL") << "] " << name;
  if (!note.empty()) out << " -- " << note;
  out << '\n';
  for (const auto &[k, v] : values) out << name << '.' << k << '=' << v << '\n';
  return out.str();
}

// ------------------------------------------------------------------ synthetic problems

Problem make_synthetic(const SyntheticOptions &o) {
  if (o.n < 1 || o.d < 1) throw argument_error("make_synthetic: n and d must be >= 1");
  if (!(o.density > 0.0) || o.density > 1.0) throw argument_error("make_synthetic: density must be in (0, 1]");
  Rng rng(o.seed);
  const Vector w = normal_vector(rng, o.d) / std::sqrt(static_cast<double>(o.d) * o.density);

  std::vector<SparseVec> rows;
  std::vector<double> labels;
  rows.reserve(o.n);
  labels.reserve(o.n);
  for (std::size_t i = 0; i < o.n; ++i) {
    std::vector<SparseVec::index_type> idx;
    std::vector<double> val;
    if (o.density >= 1.0) {
      idx.resize(o.d);
      std::iota(idx.begin(), idx.end(), SparseVec::index_type{0});
    } else {
      for (std::size_t k = 0; k < o.d; ++k)
        if (rng.uniform() < o.density) idx.push_back(static_cast<SparseVec::index_type>(k));
      if (idx.empty()) idx.push_back(static_cast<SparseVec::index_type>(rng.bounded(o.d)));
    }
    val.resize(idx.size());
    for (double &v : val) v = rng.normal();
    if (o.unit_rows) {
      double s = 0.0;
      for (double v : val) s += v * v;
      s = std::sqrt(s);
      if (s > 0.0)
        for (double &v : val) v /= s;
    }
    SparseVec row(std::move(idx), std::move(val));
    const double margin = row.dot(w);
    double label;
    if (o.loss == LossKind::squared) {
      label = margin + o.noise * rng.normal();
    } else {
      label = margin >= 0.0 ? 1.0 : -1.0;
      if (rng.uniform() < o.noise) label = -label;
    }
    rows.push_back(std::move(row));
    labels.push_back(label);
  }
  auto ds = std::make_shared<const Dataset>(std::move(rows), std::move(labels), o.d);
  return derive_constants(std::move(ds), o.loss, o.mu);
}

Problem make_conditioned_quadratic(std::size_t n, std::size_t d, double condition, std::uint64_t seed) {
  if (!(condition > 1.0)) throw argument_error("make_conditioned_quadratic: condition must exceed 1");
  SyntheticOptions o;
  o.n = n;
  o.d = d;
  o.loss = LossKind::squared;
  o.mu = 1.0 / (condition - 1.0);
  o.unit_rows = true;
  o.seed = seed;
  return make_synthetic(o);
}

// ------------------------------------------------------------------ reference solution

namespace {

Eigen::MatrixXd term_gradients(const Problem &problem, const Vector &x) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(problem.d()), static_cast<Eigen::Index>(problem.n()));
  for (std::size_t i = 0; i < problem.n(); ++i) g.col(static_cast<Eigen::Index>(i)) = term_gradient(problem, i, x);
  return g;
}

ReferenceSolution reference_squared(const Problem &problem) {
  const Dataset &ds = *problem.data;
  const double n = static_cast<double>(ds.n());
  const Eigen::MatrixXd A = dense_rows(ds);
  const Vector y = dense_labels(ds);
  Eigen::MatrixXd H = A.transpose() * A / n;
  H.diagonal().array() += problem.mu;
  const Vector b = A.transpose() * y / n;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
  Vector x = ldlt.solve(b);
  x += ldlt.solve(b - H * x);  // one step of refinement

  ReferenceSolution ref;
  ref.x = std::move(x);
  ref.g = term_gradients(problem, ref.x);
  ref.fstar = objective(problem, ref.x);
  ref.residual = full_gradient(problem, ref.x).norm();
  ref.method = "normal-equations";
  return ref;
}

ReferenceSolution reference_logistic(const Problem &problem, const ReferenceOptions &options) {
  const Dataset &ds = *problem.data;
  const double n = static_cast<double>(ds.n());
  const Eigen::MatrixXd A = dense_rows(ds);
  const Vector y = dense_labels(ds);
  const auto d = static_cast<Eigen::Index>(ds.d());

  Vector x = Vector::Zero(d);
  Vector grad = full_gradient(problem, x);
  double f = objective(problem, x);
  for (int it = 0; it < options.max_newton && grad.norm() > options.tol; ++it) {
    const Vector margins = A * x;
    Vector weights(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-y[i] * margins[i]));
      weights[i] = p * (1.0 - p);
    }
    Eigen::MatrixXd H = A.transpose() * weights.asDiagonal() * A / n;
    H.diagonal().array() += problem.mu;
    const Vector dx = -H.ldlt().solve(grad);
    const double slope = grad.dot(dx);
    Vector trial = x + dx;
    double ft = objective(problem, trial);
    Vector trial_grad = full_gradient(problem, trial);
    // Near the optimum f stops resolving the Armijo decrease; a full step that shrinks the
    // gradient is taken anyway.
    if (ft > f + 1e-4 * slope && trial_grad.norm() >= grad.norm()) {
      double t = 1.0;
      while (ft > f + 1e-4 * t * slope && t > 1e-12) {
        t *= 0.5;
        trial = x + t * dx;
        ft = objective(problem, trial);
      }
      trial_grad = full_gradient(problem, trial);
      if (ft > f && trial_grad.norm() >= grad.norm()) break;
    }
    x = std::move(trial);
    f = ft;
    grad = trial_grad;
  }

  ReferenceSolution ref;
  ref.x = std::move(x);
  ref.g = term_gradients(problem, ref.x);
  ref.fstar = objective(problem, ref.x);
  ref.residual = grad.norm();
  ref.method = "newton";
  if (!(ref.residual <= options.tol))
    throw numerical_error("solve_reference: logistic Newton stalled at gradient norm " +
                          std::to_string(ref.residual));
  return ref;
}

struct HingePolish {
  bool ok = false;
  Vector x;
  std::vector<double> alpha;
  double residual = std::numeric_limits<double>::infinity();
};

// Given margins from an approximate solution, fix alpha = 1 on margin < 1, alpha = 0 on
// margin > 1, and solve for the kink weights so every kink example has margin exactly 1.
HingePolish polish_hinge(const Problem &problem, const Vector &x_approx, double band) {
  const Dataset &ds = *problem.data;
  const std::size_t n = ds.n();
  const double scale = problem.mu * static_cast<double>(n);
  const auto d = static_cast<Eigen::Index>(ds.d());

  std::vector<int> state(n);  // -1 active (alpha = 1), 0 kink, +1 inactive
  std::vector<std::size_t> kink;
  Vector base = Vector::Zero(d);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = ds.label(i) * ds.row(i).dot(x_approx);
    if (ds.row(i).empty()) {
      state[i] = m < 1.0 ? -1 : 1;
    } else if (std::abs(m - 1.0) <= band) {
      state[i] = 0;
      kink.push_back(i);
      continue;
    } else {
      state[i] = m < 1.0 ? -1 : 1;
    }
    if (state[i] < 0) ds.row(i).axpy(ds.label(i), base);
  }

  HingePolish out;
  out.alpha.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (state[i] < 0) out.alpha[i] = 1.0;

  Vector x = base / scale;
  double alpha_violation = 0.0;
  if (!kink.empty()) {
    const auto K = static_cast<Eigen::Index>(kink.size());
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(d, K);
    Vector rhs(K);
    for (Eigen::Index k = 0; k < K; ++k) {
      const std::size_t i = kink[static_cast<std::size_t>(k)];
      Vector col = Vector::Zero(d);
      ds.row(i).axpy(ds.label(i), col);
      Y.col(k) = col;
      rhs[k] = scale - ds.label(i) * ds.row(i).dot(base);
    }
    const Eigen::MatrixXd M = Y.transpose() * Y;
    Vector a = M.completeOrthogonalDecomposition().solve(rhs);
    for (Eigen::Index k = 0; k < K; ++k) {
      alpha_violation = std::max({alpha_violation, -a[k], a[k] - 1.0});
      a[k] = std::clamp(a[k], 0.0, 1.0);
      out.alpha[kink[static_cast<std::size_t>(k)]] = a[k];
    }
    x = (base + Y * a) / scale;
  }

  double violation = alpha_violation;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = ds.label(i) * ds.row(i).dot(x);
    if (state[i] < 0) violation = std::max(violation, m - 1.0);
    else if (state[i] > 0) violation = std::max(violation, 1.0 - m);
    else violation = std::max(violation, std::abs(m - 1.0));
  }
  out.x = std::move(x);
  out.residual = violation;
  out.ok = true;
  return out;
}

ReferenceSolution reference_hinge(const Problem &problem, const ReferenceOptions &options) {
  const Dataset &ds = *problem.data;
  const std::size_t n = ds.n();
  const double scale = problem.mu * static_cast<double>(n);
  std::vector<double> alpha(n, 0.0);
  Vector w = Vector::Zero(static_cast<Eigen::Index>(ds.d()));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(options.seed);

  auto primal = [&] { return objective(problem, w); };
  auto dual = [&] {
    double s = 0.0;
    for (double a : alpha) s += a;
    return s / static_cast<double>(n) - 0.5 * problem.mu * w.squaredNorm();
  };

  double next_polish_gap = 1e-6;
  HingePolish best;
  for (std::size_t epoch = 0; epoch < options.max_dual_epochs; ++epoch) {
    for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.bounded(k)]);
    for (std::size_t i : order) {
      const SparseVec &row = ds.row(i);
      const double q = row.squared_norm();
      if (q == 0.0) continue;
      const double y = ds.label(i);
      const double m = y * row.dot(w);
      const double a = std::clamp(alpha[i] + (1.0 - m) * scale / q, 0.0, 1.0);
      if (a != alpha[i]) {
        row.axpy((a - alpha[i]) * y / scale, w);
        alpha[i] = a;
      }
    }
    const double gap = primal() - dual();
    if (gap <= next_polish_gap || epoch + 1 == options.max_dual_epochs) {
      next_polish_gap = gap / 10.0;
      for (double band : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9}) {
        HingePolish p = polish_hinge(problem, w, band);
        if (p.residual < best.residual) best = std::move(p);
        if (best.residual <= options.tol) break;
      }
      if (best.residual <= options.tol) break;
    }
  }
  if (!(best.residual <= options.tol))
    throw numerical_error("solve_reference: hinge optimality residual " + std::to_string(best.residual) +
                          " above tolerance");

  ReferenceSolution ref;
  ref.x = best.x;
  ref.g.resize(static_cast<Eigen::Index>(ds.d()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    Vector gi = problem.mu * ref.x;
    ds.row(i).axpy(-best.alpha[i] * ds.label(i), gi);
    ref.g.col(static_cast<Eigen::Index>(i)) = gi;
  }
  ref.fstar = objective(problem, ref.x);
  ref.residual = std::max(best.residual, ref.g.rowwise().sum().norm() / static_cast<double>(n));
  ref.method = "dual-coordinate-ascent+kink-solve";
  return ref;
}

}  // namespace

ReferenceSolution solve_reference(const Problem &problem, const ReferenceOptions &options) {
  if (!(problem.mu > 0.0)) throw argument_error("solve_reference: requires mu > 0");
  switch (problem.loss) {
    case LossKind::squared:
      return reference_squared(problem);
    case LossKind::logistic:
      return reference_logistic(problem, options);
    case LossKind::hinge:
      return reference_hinge(problem, options);
  }
  throw argument_error("solve_reference: unknown loss");
}

// ------------------------------------------------------------------ Lyapunov

LyapunovSample lyapunov(const Vector &x, const Eigen::MatrixXd &g, const ReferenceSolution &ref, double mu,
                        double L) {
  LyapunovSample s;
  s.c = 1.0 / (mu * L);
  s.table_term = s.c / static_cast<double>(g.cols()) * (g - ref.g).squaredNorm();
  s.distance_term = (x - ref.x).squaredNorm();
  s.T = s.table_term + s.distance_term;
  return s;
}

LyapunovSample lyapunov(const PointSaga &state, const ReferenceSolution &ref, double mu, double L) {
  return lyapunov(state.x(), state.table().entries(), ref, mu, L);
}

CheckReport check_descent(const PointSaga &state, const ReferenceSolution &ref, std::size_t trials,
                          std::uint64_t seed) {
  CheckReport r;
  r.name = "descent";
  const Problem &problem = state.problem();
  const double mu = problem.mu;
  const double L = problem.smoothness;
  const std::size_t n = problem.n();
  const double gamma = state.gamma();
  const LyapunovSample T0 = lyapunov(state, ref, mu, L);
  const double k = kappa(mu, gamma);
  r.add("gamma", gamma);
  r.add("kappa", k);
  r.add("bound", 1.0 - k);
  r.add("T0", T0.T);
  r.add("trials", static_cast<double>(trials));
  if (T0.T == 0.0) {
    r.pass = true;
    r.note = "state is the fixed point; T stays 0";
    return r;
  }

  // The step is deterministic given j, so T^{k+1} takes one of n values.
  std::vector<double> next(n);
  const Eigen::MatrixXd &g = state.table().entries();
  for (std::size_t j = 0; j < n; ++j) {
    const PointSaga::Proposal p = state.propose(j);
    const auto col = static_cast<Eigen::Index>(j);
    const double old_term = (g.col(col) - ref.g.col(col)).squaredNorm();
    const double new_term = (p.g_next - ref.g.col(col)).squaredNorm();
    next[j] = T0.table_term + T0.c / static_cast<double>(n) * (new_term - old_term) + (p.x_next - ref.x).squaredNorm();
  }
  const double exact = std::accumulate(next.begin(), next.end(), 0.0) / static_cast<double>(n) / T0.T;

  std::vector<double> ratios(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    ratios[t] = next[rng.bounded(n)] / T0.T;
  }
  const MeanStd ms = mean_stderr(ratios);
  r.add("ratio", ms.mean);
  r.add("stderr", ms.stderr_);
  r.add("exact_ratio", exact);
  r.pass = ms.mean <= (1.0 - k) + 3.0 * ms.stderr_;
  return r;
}

CheckReport check_descent(const Problem &problem, const ReferenceSolution &ref, std::size_t trials,
                          std::uint64_t seed, double spread) {
  const double L = problem.smoothness;
  PointSagaOptions options;
  options.gamma = step_size_default(problem.n(), L, problem.mu);
  options.storage = TableStorage::full;
  PointSaga state(problem, options);
  Rng rng(derive_seed(seed, std::numeric_limits<std::uint64_t>::max()));
  const double gscale = spread * std::sqrt(problem.mu * L);
  Vector x = ref.x + spread * normal_vector(rng, problem.d());
  Eigen::MatrixXd g = ref.g;
  for (Eigen::Index i = 0; i < g.cols(); ++i) g.col(i) += gscale * normal_vector(rng, problem.d());
  state.set_state(x, g);
  return check_descent(state, ref, trials, seed);
}

CheckReport check_chained_rate(const Problem &problem, const ReferenceSolution &ref, const Vector &x0,
                               const std::vector<std::size_t> &ks, std::size_t seeds, std::uint64_t root_seed) {
  CheckReport r;
  r.name = "chained_rate";
  const double mu = problem.mu;
  const double L = problem.smoothness;
  const double gamma = step_size_default(problem.n(), L, mu);
  const double k = kappa(mu, gamma);
  const double d0 = (x0 - ref.x).squaredNorm();
  const double t0_bound = (mu + L) / mu * d0;
  r.add("gamma", gamma);
  r.add("kappa", k);
  r.add("seeds", static_cast<double>(seeds));

  std::vector<std::size_t> sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t kmax = sorted.empty() ? 0 : sorted.back();
  std::vector<std::vector<double>> dist(sorted.size());
  double worst_t0 = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    PointSagaOptions options;
    options.gamma = gamma;
    options.init = InitMode::subgradient;
    options.x0 = x0;
    PointSaga solver(problem, options);
    worst_t0 = std::max(worst_t0, lyapunov(solver, ref, mu, L).T / t0_bound);
    IndexSampler sampler(problem.n(), derive_seed(root_seed, s));
    std::size_t next = 0;
    for (std::size_t step = 1; step <= kmax; ++step) {
      solver.step(sampler.next());
      while (next < sorted.size() && sorted[next] == step) {
        dist[next].push_back((solver.x() - ref.x).squaredNorm());
        ++next;
      }
    }
  }
  r.add("T0_over_bound", worst_t0);
  bool pass = worst_t0 <= 1.0 + 1e-12;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const MeanStd ms = mean_stderr(dist[i]);
    const double bound = std::pow(1.0 - k, static_cast<double>(sorted[i])) * t0_bound;
    r.add("mean_" + key_suffix(sorted[i]), ms.mean);
    r.add("stderr_" + key_suffix(sorted[i]), ms.stderr_);
    r.add("bound_" + key_suffix(sorted[i]), bound);
    pass = pass && ms.mean <= bound + 3.0 * ms.stderr_;
  }
  r.pass = pass;
  return r;
}

CheckReport check_nonsmooth_rate(const Problem &problem, const ReferenceSolution &ref,
                                 const std::vector<std::size_t> &ks, std::size_t seeds, std::uint64_t root_seed,
                                 double R, double B, double max_spread) {
  CheckReport r;
  r.name = "nonsmooth_rate";
  const std::size_t n = problem.n();
  if (!(R > 0.0)) R = ref.x.norm();
  if (!(B > 0.0)) B = ref.g.colwise().norm().maxCoeff();
  const double gamma = nonsmooth_step_size(R, B, n);
  r.add("R", R);
  r.add("B", B);
  r.add("gamma", gamma);
  r.add("seeds", static_cast<double>(seeds));

  std::vector<std::size_t> sorted = ks;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t kmax = sorted.empty() ? 0 : sorted.back();
  std::vector<std::vector<double>> scaled(sorted.size());
  for (std::size_t s = 0; s < seeds; ++s) {
    PointSagaOptions options;
    options.gamma = gamma;
    options.track_average = true;
    PointSaga solver(problem, options);
    IndexSampler sampler(n, derive_seed(root_seed, s));
    std::size_t next = 0;
    for (std::size_t step = 1; step <= kmax; ++step) {
      solver.step(sampler.next());
      while (next < sorted.size() && sorted[next] == step) {
        scaled[next].push_back(static_cast<double>(step) * (*solver.average() - ref.x).squaredNorm());
        ++next;
      }
    }
  }
  // O(1/k) bound on k E|xbar^k - x*|^2.
  const double bound = 2.0 * std::sqrt(static_cast<double>(n)) * (1.0 + problem.mu * gamma) * R * B / problem.mu;
  r.add("bound", bound);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool within = true;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const MeanStd ms = mean_stderr(scaled[i]);
    r.add("k_dist_" + key_suffix(sorted[i]), ms.mean);
    r.add("stderr_" + key_suffix(sorted[i]), ms.stderr_);
    lo = std::min(lo, ms.mean);
    hi = std::max(hi, ms.mean);
    within = within && ms.mean <= bound;
  }
  const double spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  r.add("spread", spread);
  r.add("within_bound", within ? 1.0 : 0.0);
  r.pass = spread <= max_spread;
  return r;
}

// ------------------------------------------------------------------ operator checks

CheckReport check_operator_inequalities(std::size_t pairs, std::uint64_t seed, double slack) {
  CheckReport r;
  r.name = "operator_inequalities";
  Rng rng(seed);
  double worst_firm = 0.0;
  double worst_g = 0.0;
  double worst_opt = 0.0;
  NewtonOptions newton;
  newton.tol = 1e-14;
  newton.max_iter = 200;
  for (std::size_t p = 0; p < pairs; ++p) {
    const LossKind loss = p % 2 == 0 ? LossKind::logistic : LossKind::squared;
    const std::size_t d = 1 + static_cast<std::size_t>(rng.bounded(5));
    std::vector<SparseVec::index_type> idx(d);
    std::iota(idx.begin(), idx.end(), SparseVec::index_type{0});
    std::vector<double> val(d);
    const double xscale = log_uniform(rng, 0.1, 3.0);
    for (double &v : val) v = xscale * rng.normal();
    const double label = loss == LossKind::squared ? 2.0 * rng.normal() : (rng.uniform() < 0.5 ? -1.0 : 1.0);
    auto ds = std::make_shared<const Dataset>(std::vector<SparseVec>{SparseVec(std::move(idx), std::move(val))},
                                              std::vector<double>{label}, d);
    const double mu = log_uniform(rng, 1e-3, 1.0);
    const Problem problem = derive_constants(std::move(ds), loss, mu);
    const double gamma = log_uniform(rng, 1e-2, 10.0);
    const double L = problem.smoothness;

    const double pscale = log_uniform(rng, 0.1, 3.0);
    const Vector x = pscale * normal_vector(rng, d);
    const Vector y = pscale * normal_vector(rng, d);
    Vector px;
    Vector py;
    prox_term(problem, 0, x, gamma, px, nullptr, newton);
    prox_term(problem, 0, y, gamma, py, nullptr, newton);
    const Vector dp = px - py;
    const Vector dz = x - y;
    worst_firm = std::max(worst_firm, (1.0 + mu * gamma) * dp.squaredNorm() - dz.dot(dp));

    const Vector gx = (x - px) / gamma;
    const Vector gy = (y - py) / gamma;
    const Vector dg = gx - gy;
    worst_g = std::max(worst_g, gamma * (1.0 + 1.0 / (L * gamma)) * dg.squaredNorm() - dg.dot(dz));

    worst_opt = std::max(worst_opt, (gx - term_gradient(problem, 0, px)).norm());
    worst_opt = std::max(worst_opt, (gy - term_gradient(problem, 0, py)).norm());
  }
  r.add("pairs", static_cast<double>(pairs));
  r.add("firm_violation", worst_firm);
  r.add("g_bound_violation", worst_g);
  r.add("optimality_error", worst_opt);
  r.pass = worst_firm <= slack && worst_g <= slack && worst_opt <= 1e-8;
  return r;
}

std::vector<ProxPair> known_conjugate_pairs() {
  std::vector<ProxPair> pairs;
  auto quadratic = [](double q, std::size_t dim) {
    ProxPair p;
    p.name = "quadratic_q" + std::to_string(q).substr(0, 4);
    p.dim = dim;
    p.prox_f = [q](const Vector &x, double t) -> Vector { return x / (1.0 + t * q); };
    p.prox_conj = [q](const Vector &u, double t) -> Vector { return u * (q / (q + t)); };
    return p;
  };
  pairs.push_back(quadratic(1.0, 3));
  pairs.push_back(quadratic(4.0, 3));
  pairs.push_back(quadratic(0.25, 2));

  ProxPair zero;
  zero.name = "zero";
  zero.dim = 3;
  zero.prox_f = [](const Vector &x, double) -> Vector { return x; };
  zero.prox_conj = [](const Vector &u, double) -> Vector { return Vector::Zero(u.size()); };
  pairs.push_back(zero);

  ProxPair l1;
  l1.name = "l1";
  l1.dim = 4;
  l1.prox_f = [](const Vector &x, double t) -> Vector {
    return x.unaryExpr([t](double v) { return std::copysign(std::max(std::abs(v) - t, 0.0), v); });
  };
  l1.prox_conj = [](const Vector &u, double) -> Vector { return u.cwiseMax(-1.0).cwiseMin(1.0); };
  pairs.push_back(l1);

  for (double label : {1.0, -1.0}) {
    // f(q) = max(0, 1 - y q); f*(u) = y u on {u : y u in [-1, 0]}.
    ProxPair hinge;
    hinge.name = label > 0 ? "hinge_pos" : "hinge_neg";
    hinge.dim = 1;
    hinge.prox_f = [label](const Vector &x, double t) -> Vector {
      Vector out(1);
      out[0] = prox_hinge(x[0], label, t).c;
      return out;
    };
    hinge.prox_conj = [label](const Vector &u, double t) -> Vector {
      const double lo = label > 0 ? -1.0 : 0.0;
      const double hi = label > 0 ? 0.0 : 1.0;
      Vector out(1);
      out[0] = std::clamp(u[0] - t * label, lo, hi);
      return out;
    };
    pairs.push_back(hinge);
  }
  return pairs;
}

CheckReport check_moreau(const std::vector<ProxPair> &pairs, std::size_t samples, std::uint64_t seed, double tol) {
  CheckReport r;
  r.name = "moreau";
  Rng rng(seed);
  double worst_identity = 0.0;
  double worst_gconj = 0.0;
  for (const ProxPair &pair : pairs) {
    double pair_worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      const Vector x = 2.0 * normal_vector(rng, pair.dim);
      const double gamma = s == 0 ? 1.0 : log_uniform(rng, 1e-2, 1e2);
      const Vector p = pair.prox_f(x, gamma);
      const Vector q = pair.prox_conj(x / gamma, 1.0 / gamma);
      const double identity = (p - (x - gamma * q)).lpNorm<Eigen::Infinity>();
      const double gconj = (q - (x - p) / gamma).lpNorm<Eigen::Infinity>();
      worst_identity = std::max(worst_identity, identity);
      worst_gconj = std::max(worst_gconj, gconj);
      pair_worst = std::max({pair_worst, identity, gconj});
    }
    r.add("residual_" + pair.name, pair_worst);
  }
  r.add("identity_residual", worst_identity);
  r.add("gconj_residual", worst_gconj);
  r.pass = worst_identity <= tol && worst_gconj <= tol;
  return r;
}

// ------------------------------------------------------------------ scalar oracle

namespace {

double softplus(double u) { return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

// softplus(u) - softplus(v) without cancellation when u and v are close.
double softplus_difference(double u, double v) {
  const double h = u - v;
  if (std::abs(h) > 1.0) return softplus(u) - softplus(v);
  if (v > 0.0) {
    // softplus(w) = w + softplus(-w)
    const double e = std::exp(-v);
    return h + std::log1p(e * std::expm1(-h) / (1.0 + e));
  }
  const double e = std::exp(v);
  return std::log1p(e * std::expm1(h) / (1.0 + e));
}

// l(c) - l(d).
double loss_difference(LossKind loss, double c, double d, double y) {
  switch (loss) {
    case LossKind::squared:
      return 0.5 * (c - d) * (c + d - 2.0 * y);
    case LossKind::hinge: {
      const double uc = 1.0 - y * c;
      const double ud = 1.0 - y * d;
      if (uc > 0.0 && ud > 0.0) return y * (d - c);
      return std::max(uc, 0.0) - std::max(ud, 0.0);
    }
    case LossKind::logistic:
      return softplus_difference(-y * c, -y * d);
  }
  return 0.0;
}

}  // namespace

double brute_force_prox_1d(LossKind loss, double a, double y, double gamma_p, double lo, double hi, double tol) {
  if (!(lo <= hi)) throw argument_error("brute_force_prox_1d: empty bracket");
  if (!(tol > 0.0)) throw argument_error("brute_force_prox_1d: tol must be positive");
  // F(c) - F(d) for F(c) = gamma_p l(c) + (c - a)^2 / 2.
  auto diff = [&](double c, double d) {
    return gamma_p * loss_difference(loss, c, d, y) + 0.5 * (c - d) * (c + d - 2.0 * a);
  };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  while (hi - lo > tol) {
    if (diff(c, d) < 0.0) {
      hi = d;
      d = c;
      c = hi - invphi * (hi - lo);
    } else {
      lo = c;
      c = d;
      d = lo + invphi * (hi - lo);
    }
    if (!(c > lo && c < hi) || !(d > lo && d < hi) || c >= d) {
      // Interval at rounding level.
      break;
    }
  }
  return 0.5 * (lo + hi);
}

double brute_force_prox_1d(LossKind loss, double a, double y, double gamma_p, double tol) {
  if (!(gamma_p > 0.0)) throw argument_error("brute_force_prox_1d: gamma_p must be positive");
  double lo;
  double hi;
  if (loss == LossKind::squared) {
    lo = std::min(a, y);
    hi = std::max(a, y);
  } else {
    lo = a - gamma_p;
    hi = a + gamma_p;
  }
  const double pad = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  return brute_force_prox_1d(loss, a, y, gamma_p, lo - pad, hi + pad, tol);
}

CheckReport check_prox_oracle(std::size_t samples, std::uint64_t seed, double gamma_lo, double gamma_hi, double tol) {
  CheckReport r;
  r.name = "prox_oracle";
  Rng rng(seed);
  bool pass = true;
  for (LossKind loss : {LossKind::hinge, LossKind::logistic, LossKind::squared}) {
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      const double a = rng.uniform(-10.0, 10.0);
      const double y = loss == LossKind::squared ? rng.uniform(-10.0, 10.0) : (rng.uniform() < 0.5 ? -1.0 : 1.0);
      const double gp = log_uniform(rng, gamma_lo, gamma_hi);
      const double c = prox_scalar(loss, a, y, gp).c;
      const double oracle = brute_force_prox_1d(loss, a, y, gp, 1e-12);
      worst = std::max(worst, std::abs(c - oracle));
    }
    r.add(std::string("max_error_") + std::string(to_string(loss)), worst);
    pass = pass && worst <= tol;
  }
  r.add("samples_per_loss", static_cast<double>(samples));
  r.pass = pass;
  return r;
}

CheckReport check_newton_iterations(std::size_t samples, std::uint64_t seed) {
  CheckReport r;
  r.name = "newton_iterations";
  Rng rng(seed);
  std::vector<int> total;
  std::vector<int> pure;
  for (std::size_t s = 0; s < samples; ++s) {
    const double a = 3.0 * rng.normal();
    const double y = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double gp = log_uniform(rng, 1e-3, 10.0);
    const ProxResult res = prox_logistic(a, y, gp);
    total.push_back(res.iterations + res.bisections);
    if (res.bisections == 0) pure.push_back(res.iterations);
  }
  auto median = [](std::vector<int> v) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    return static_cast<double>(v[v.size() / 2]);
  };
  auto max_of = [](const std::vector<int> &v) {
    return v.empty() ? kNaN : static_cast<double>(*std::max_element(v.begin(), v.end()));
  };
  // Counts include bisection steps, so instances where the safeguard fired are not excluded.
  r.add("median", median(total));
  r.add("max", max_of(total));
  r.add("newton_only_median", median(pure));
  r.add("newton_only_max", max_of(pure));
  r.add("safeguarded_fraction", 1.0 - static_cast<double>(pure.size()) / static_cast<double>(samples));
  r.pass = !total.empty() && median(total) <= 3.0 && max_of(total) <= 12.0;
  return r;
}

}  // namespace psaga
