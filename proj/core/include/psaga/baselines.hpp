#ifndef PSAGA_BASELINES_HPP
#define PSAGA_BASELINES_HPP

#include "psaga/point_saga.hpp"
#include "psaga/solver.hpp"

#include <Eigen/Core>

#include <memory>
#include <string_view>

namespace psaga {

enum class Method { point_saga, saga, pegasos };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// SAGA with the regularizer inside each term:
///   x+ = x - gamma [grad F_j(x) - g_j + mean g];  g_j <- grad F_j(x).
/// Dense d x n table. Smooth losses only.
class Saga final : public IncrementalSolver {
 public:
  Saga(const Problem &problem, double gamma, InitMode init = InitMode::zero);

  void step(std::size_t j) override;
  Vector iterate() const override { return x_; }
  std::uint64_t steps() const override { return steps_; }
  const Problem &problem() const override { return problem_; }
  std::string_view name() const override { return "saga"; }

  const Vector &x() const noexcept { return x_; }
  const GradientTable &table() const noexcept { return table_; }
  double gamma() const noexcept { return gamma_; }

 private:
  Problem problem_;
  double gamma_;
  Vector x_;
  GradientTable table_;
  std::uint64_t steps_ = 0;
  Vector grad_;  // scratch
};

/// Projection-free Pegasos-style SGD:
///   eta_t = 1 / (mu (t + t0)),  x+ = x - eta_t (l'(<x, X_j>) X_j + mu x),
/// with t = 1, 2, ... the step number. Requires mu > 0.
class Pegasos final : public IncrementalSolver {
 public:
  Pegasos(const Problem &problem, double t0 = 1.0, bool track_average = false);

  void step(std::size_t j) override;
  Vector iterate() const override { return x_; }
  std::optional<Vector> average() const override;
  std::uint64_t steps() const override { return steps_; }
  const Problem &problem() const override { return problem_; }
  std::string_view name() const override { return "pegasos"; }

  const Vector &x() const noexcept { return x_; }
  double t0() const noexcept { return t0_; }
  double step_size(std::uint64_t t) const { return 1.0 / (problem_.mu * (static_cast<double>(t) + t0_)); }

 private:
  Problem problem_;
  double t0_;
  bool track_average_;
  Vector x_;
  Vector average_;
  std::uint64_t steps_ = 0;
};

}  // namespace psaga

#endif
