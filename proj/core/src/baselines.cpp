#include "psaga/baselines.hpp"

#include "psaga/error.hpp"
#include "psaga/losses.hpp"

#include <cmath>
#include <string>

namespace psaga {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::point_saga:
      return "point-saga";
    case Method::saga:
      return "saga";
    case Method::pegasos:
      return "pegasos";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "point-saga" || name == "point_saga" || name == "psaga") return Method::point_saga;
  if (name == "saga") return Method::saga;
  if (name == "pegasos" || name == "sgd") return Method::pegasos;
  throw argument_error("unknown method '" + std::string(name) + "'");
}

Saga::Saga(const Problem &problem, double gamma, InitMode init) : problem_(problem), gamma_(gamma) {
  if (!problem_.smooth()) throw argument_error("saga: requires a smooth loss (logistic or squared)");
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) throw argument_error("saga: gamma must be positive");
  const std::size_t n = problem_.n();
  const std::size_t d = problem_.d();
  x_ = Vector::Zero(static_cast<Eigen::Index>(d));
  table_ = GradientTable(n, d);
  if (init == InitMode::subgradient) {
    Eigen::MatrixXd g(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) g.col(static_cast<Eigen::Index>(i)) = term_gradient(problem_, i, x_);
    table_.assign(g);
  }
}

void Saga::step(std::size_t j) {
  grad_ = term_gradient(problem_, j, x_);
  x_ -= gamma_ * (grad_ - table_.entry(j) + table_.mean());
  table_.set(j, grad_);
  ++steps_;
}

Pegasos::Pegasos(const Problem &problem, double t0, bool track_average)
    : problem_(problem), t0_(t0), track_average_(track_average) {
  if (!(problem_.mu > 0.0)) throw argument_error("pegasos: requires mu > 0");
  if (!(t0_ >= 0.0) || !std::isfinite(t0_)) throw argument_error("pegasos: t0 must be >= 0");
  x_ = Vector::Zero(static_cast<Eigen::Index>(problem_.d()));
  if (track_average_) average_ = Vector::Zero(x_.size());
}

void Pegasos::step(std::size_t j) {
  const SparseVec &row = problem_.data->row(j);
  const double eta = step_size(steps_ + 1);
  const double k = loss_subgradient(problem_.loss, row.dot(x_), problem_.data->label(j));
  x_ *= 1.0 - eta * problem_.mu;
  row.axpy(-eta * k, x_);
  ++steps_;
  if (track_average_) average_ += (x_ - average_) / static_cast<double>(steps_);
}

std::optional<Vector> Pegasos::average() const {
  if (!track_average_ || steps_ == 0) return std::nullopt;
  return average_;
}

}  // namespace psaga
