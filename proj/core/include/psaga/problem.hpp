#ifndef PSAGA_PROBLEM_HPP
#define PSAGA_PROBLEM_HPP

#include "psaga/data.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <string_view>

namespace psaga {

enum class LossKind { hinge, logistic, squared };

std::string_view to_string(LossKind kind);
/// Accepts "hinge", "logistic", "squared". Throws argument_error otherwise.
LossKind parse_loss(std::string_view name);

inline bool is_classification(LossKind kind) { return kind != LossKind::squared; }

/// Regularized linear ERM problem: f(x) = (1/n) sum_i [ loss(<X_i, x>, y_i) + mu/2 |x|^2 ].
/// `smoothness` is the per-term Lipschitz constant of the gradient of each regularized term;
/// +infinity for hinge.
struct Problem {
  std::shared_ptr<const Dataset> data;
  LossKind loss = LossKind::squared;
  double mu = 0.0;
  double smoothness = std::numeric_limits<double>::infinity();

  std::size_t n() const { return data->n(); }
  std::size_t d() const { return data->d(); }
  bool smooth() const { return std::isfinite(smoothness); }
  double condition_number() const { return smoothness / mu; }
};

/// Curvature bound of the scalar loss: 1/4 for logistic, 1 for squared, +inf for hinge.
double loss_curvature_bound(LossKind kind);

/// Builds a Problem with L = c_loss * max_i |X_i|^2 + mu. Classification losses require
/// +-1 labels; mu must be >= 0.
Problem derive_constants(std::shared_ptr<const Dataset> data, LossKind loss, double mu);

/// f(x) including the regularizer.
double objective(const Problem &problem, const Vector &x);

/// Gradient (or the fixed subgradient selection) of the regularized term F_i at x.
Vector term_gradient(const Problem &problem, std::size_t i, const Vector &x);

/// (1/n) sum_i term_gradient(i, x).
Vector full_gradient(const Problem &problem, const Vector &x);

}  // namespace psaga

#endif
