#include "psaga/point_saga.hpp"

#include "psaga/error.hpp"

#include <cmath>
#include <string>

namespace psaga {

std::string_view to_string(TableStorage storage) {
  return storage == TableStorage::full ? "full" : "loss_only";
}

std::string_view to_string(Backend backend) { return backend == Backend::dense ? "dense" : "lazy"; }

Backend parse_backend(std::string_view name) {
  if (name == "dense") return Backend::dense;
  if (name == "lazy") return Backend::lazy;
  throw argument_error("unknown backend '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- GradientTable

GradientTable::GradientTable(std::size_t n, std::size_t d)
    : entries_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n))),
      mean_(Vector::Zero(static_cast<Eigen::Index>(d))) {}

void GradientTable::set(std::size_t i, const Vector &g) {
  auto col = entries_.col(static_cast<Eigen::Index>(i));
  mean_ += (g - col) / static_cast<double>(n());
  col = g;
}

void GradientTable::assign(const Eigen::MatrixXd &entries) {
  if (entries.rows() != entries_.rows() || entries.cols() != entries_.cols())
    throw argument_error("GradientTable::assign: shape mismatch");
  entries_ = entries;
  refresh_mean();
}

Vector GradientTable::recomputed_mean() const {
  return entries_.rowwise().sum() / static_cast<double>(n());
}

double GradientTable::mean_drift() const { return (mean_ - recomputed_mean()).norm(); }

// ---------------------------------------------------------------- helpers

namespace {

void validate(const Problem &problem, const PointSagaOptions &options) {
  if (!(options.gamma > 0.0) || !std::isfinite(options.gamma))
    throw argument_error("point-saga: gamma must be positive");
  if (options.x0 && static_cast<std::size_t>(options.x0->size()) != problem.d())
    throw argument_error("point-saga: x0 has dimension " + std::to_string(options.x0->size()) +
                         ", expected " + std::to_string(problem.d()));
}

Vector initial_point(const Problem &problem, const PointSagaOptions &options) {
  return options.x0 ? *options.x0 : Vector::Zero(static_cast<Eigen::Index>(problem.d()));
}

double initial_coefficient(const Problem &problem, std::size_t i, const Vector &x0) {
  const Dataset &ds = *problem.data;
  return loss_subgradient(problem.loss, ds.row(i).dot(x0), ds.label(i));
}

}  // namespace

// ---------------------------------------------------------------- PointSaga

PointSaga::PointSaga(const Problem &problem, PointSagaOptions options)
    : problem_(problem), options_(std::move(options)) {
  validate(problem_, options_);
  const std::size_t n = problem_.n();
  const std::size_t d = problem_.d();
  x_ = initial_point(problem_, options_);
  table_ = GradientTable(n, d);
  if (options_.init == InitMode::subgradient) {
    Eigen::MatrixXd g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      Vector gi = Vector::Zero(static_cast<Eigen::Index>(d));
      if (options_.storage == TableStorage::full) gi = problem_.mu * x_;
      problem_.data->row(i).axpy(initial_coefficient(problem_, i, x_), gi);
      g.col(static_cast<Eigen::Index>(i)) = gi;
    }
    table_.assign(g);
  }
  if (options_.track_average) average_ = Vector::Zero(static_cast<Eigen::Index>(d));
}

PointSaga::Proposal PointSaga::propose(std::size_t j) const {
  Proposal p;
  const double gamma = options_.gamma;
  p.z = x_ + gamma * (table_.entry(j) - table_.mean());
  prox_term(problem_, j, p.z, gamma, p.x_next, &p.scalar, options_.newton);
  p.g_next = (p.z - p.x_next) / gamma;
  if (options_.storage == TableStorage::loss_only) p.g_next -= problem_.mu * p.x_next;
  return p;
}

void PointSaga::commit(std::size_t j, Proposal proposal) {
  table_.set(j, proposal.g_next);
  x_ = std::move(proposal.x_next);
  ++steps_;
  if (options_.track_average) average_ += (x_ - average_) / static_cast<double>(steps_);
}

void PointSaga::step(std::size_t j) { commit(j, propose(j)); }

std::optional<Vector> PointSaga::average() const {
  if (!options_.track_average || steps_ == 0) return std::nullopt;
  return average_;
}

void PointSaga::set_state(const Vector &x, const Eigen::MatrixXd &table_entries) {
  if (static_cast<std::size_t>(x.size()) != problem_.d())
    throw argument_error("PointSaga::set_state: dimension mismatch");
  x_ = x;
  table_.assign(table_entries);
}

// ---------------------------------------------------------------- LazyPointSaga

LazyPointSaga::LazyPointSaga(const Problem &problem, PointSagaOptions options)
    : problem_(problem), options_(std::move(options)) {
  validate(problem_, options_);
  if (problem_.mu > 0.0 && options_.storage != TableStorage::loss_only)
    throw argument_error("lazy backend: full table storage needs a dense table when mu > 0; "
                         "use storage=loss_only or the dense backend");
  if (options_.track_average) throw argument_error("lazy backend does not track averages");

  const std::size_t n = problem_.n();
  const std::size_t d = problem_.d();
  rho_ = fold_factor(problem_.mu, options_.gamma);
  w_ = initial_point(problem_, options_);
  last_.assign(d, 0);
  gbar_ = Vector::Zero(static_cast<Eigen::Index>(d));
  coef_.assign(n, 0.0);
  if (options_.init == InitMode::subgradient) {
    for (std::size_t i = 0; i < n; ++i) {
      coef_[i] = initial_coefficient(problem_, i, w_);
      problem_.data->row(i).axpy(coef_[i], gbar_);
    }
    gbar_ /= static_cast<double>(n);
  }
}

double LazyPointSaga::drift_factor(std::uint64_t m) const {
  // sum_{s=1..m} rho^s = rho (1 - rho^m) / (1 - rho) = (1 - rho^m) / (mu gamma)
  const double mg = problem_.mu * options_.gamma;
  if (mg == 0.0) return static_cast<double>(m);
  return -std::expm1(-static_cast<double>(m) * std::log1p(mg)) / mg;
}

double LazyPointSaga::current(std::size_t d) const {
  const std::uint64_t m = steps_ - last_[d];
  const double x = scale_ * w_[static_cast<Eigen::Index>(d)];
  if (m == 0) return x;
  return x - options_.gamma * gbar_[static_cast<Eigen::Index>(d)] * drift_factor(m);
}

void LazyPointSaga::step(std::size_t j) {
  const SparseVec &row = problem_.data->row(j);
  const auto idx = row.indices();
  const auto val = row.values();
  const std::size_t nnz = row.nnz();
  const double gamma = options_.gamma;
  const double n = static_cast<double>(problem_.n());

  z_.resize(nnz);
  double a = 0.0;
  for (std::size_t k = 0; k < nnz; ++k) {
    const std::size_t d = idx[k];
    z_[k] = current(d) + gamma * (coef_[j] * val[k] - gbar_[static_cast<Eigen::Index>(d)]);
    a += z_[k] * val[k];
  }
  a *= rho_;

  const double next_scale = scale_ * rho_;
  double nu = 0.0;
  const double norm2 = row.squared_norm();
  if (norm2 > 0.0) {
    const ProxResult r =
        prox_scalar(problem_.loss, a, problem_.data->label(j), rho_ * gamma * norm2, options_.newton);
    const double q = (a - r.c) / norm2;
    for (std::size_t k = 0; k < nnz; ++k) {
      const std::size_t d = idx[k];
      w_[static_cast<Eigen::Index>(d)] = (rho_ * z_[k] - q * val[k]) / next_scale;
      last_[d] = steps_ + 1;
    }
    nu = q / (rho_ * gamma);
  }
  const double delta = (nu - coef_[j]) / n;
  for (std::size_t k = 0; k < nnz; ++k) gbar_[static_cast<Eigen::Index>(idx[k])] += delta * val[k];
  coef_[j] = nu;

  scale_ = next_scale;
  ++steps_;
  if (scale_ < 1e-150) flush();
}

void LazyPointSaga::flush() {
  for (std::size_t d = 0; d < last_.size(); ++d) {
    w_[static_cast<Eigen::Index>(d)] = current(d);
    last_[d] = steps_;
  }
  scale_ = 1.0;
}

Vector LazyPointSaga::iterate() const {
  Vector x(static_cast<Eigen::Index>(last_.size()));
  for (std::size_t d = 0; d < last_.size(); ++d) x[static_cast<Eigen::Index>(d)] = current(d);
  return x;
}

// ---------------------------------------------------------------- runs

std::unique_ptr<IncrementalSolver> make_point_saga(const Problem &problem, const PointSagaOptions &options) {
  if (options.backend == Backend::lazy) return std::make_unique<LazyPointSaga>(problem, options);
  return std::make_unique<PointSaga>(problem, options);
}

Trace run_point_saga(const Problem &problem, const StepSizePlan &plan, PointSagaOptions options,
                     const RunOptions &run_options) {
  options.gamma = plan.gamma;
  auto solver = make_point_saga(problem, options);
  return run(*solver, run_options);
}

Trace run_nonsmooth(const Problem &problem, std::size_t epochs, double R, double B, std::uint64_t seed,
                    InitMode init) {
  PointSagaOptions options;
  options.init = init;
  options.track_average = true;
  RunOptions run_options;
  run_options.epochs = epochs;
  run_options.seed = seed;
  return run_point_saga(problem, StepSizePlan::nonsmooth(R, B, problem.n()), options, run_options);
}

}  // namespace psaga
