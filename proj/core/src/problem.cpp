#include "psaga/problem.hpp"

#include "psaga/error.hpp"
#include "psaga/losses.hpp"

#include <string>

namespace psaga {

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::hinge:
      return "hinge";
    case LossKind::logistic:
      return "logistic";
    case LossKind::squared:
      return "squared";
  }
  throw argument_error("unknown loss kind");
}

LossKind parse_loss(std::string_view name) {
  if (name == "hinge") return LossKind::hinge;
  if (name == "logistic") return LossKind::logistic;
  if (name == "squared") return LossKind::squared;
  throw argument_error("unknown loss '" + std::string(name) + "'");
}

double loss_curvature_bound(LossKind kind) {
  switch (kind) {
    case LossKind::hinge:
      return std::numeric_limits<double>::infinity();
    case LossKind::logistic:
      return 0.25;
    case LossKind::squared:
      return 1.0;
  }
  throw argument_error("unknown loss kind");
}

Problem derive_constants(std::shared_ptr<const Dataset> data, LossKind loss, double mu) {
  if (!data) throw argument_error("derive_constants: null dataset");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw argument_error("derive_constants: mu must be >= 0");
  if (is_classification(loss)) {
    for (double y : data->labels())
      if (y != 1.0 && y != -1.0)
        throw argument_error("classification losses require labels in {-1, +1}");
  }
  Problem p;
  p.loss = loss;
  p.mu = mu;
  p.smoothness = loss == LossKind::hinge
                     ? std::numeric_limits<double>::infinity()
                     : loss_curvature_bound(loss) * data->max_squared_norm() + mu;
  p.data = std::move(data);
  return p;
}

double objective(const Problem &problem, const Vector &x) {
  const Dataset &ds = *problem.data;
  double sum = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) sum += loss_value(problem.loss, ds.row(i).dot(x), ds.label(i));
  return sum / static_cast<double>(ds.n()) + 0.5 * problem.mu * x.squaredNorm();
}

Vector term_gradient(const Problem &problem, std::size_t i, const Vector &x) {
  const SparseVec &row = problem.data->row(i);
  Vector g = problem.mu * x;
  row.axpy(loss_subgradient(problem.loss, row.dot(x), problem.data->label(i)), g);
  return g;
}

Vector full_gradient(const Problem &problem, const Vector &x) {
  const Dataset &ds = *problem.data;
  Vector g = Vector::Zero(x.size());
  for (std::size_t i = 0; i < ds.n(); ++i)
    ds.row(i).axpy(loss_subgradient(problem.loss, ds.row(i).dot(x), ds.label(i)), g);
  g /= static_cast<double>(ds.n());
  g += problem.mu * x;
  return g;
}

}  // namespace psaga
