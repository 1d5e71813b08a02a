#ifndef PSAGA_STEP_SIZE_HPP
#define PSAGA_STEP_SIZE_HPP

#include <cstddef>
#include <string>

namespace psaga {

/// gamma = sqrt((n-1)^2 + 4 n L/mu) / (2 L n) - (1 - 1/n) / (2 L).
/// Requires n >= 1 and 0 < mu < L < inf; otherwise argument_error (supply gamma manually).
double step_size_default(std::size_t n, double L, double mu);

/// Per-step contraction kappa = mu gamma / (1 + mu gamma).
double kappa(double mu, double gamma);

/// Averaging-mode step for non-smooth terms: gamma = R / (B sqrt(n)).
double nonsmooth_step_size(double R, double B, std::size_t n);

struct StepSizePlan {
  enum class Source { theoretical, user, grid, nonsmooth };

  double gamma = 0.0;
  Source source = Source::user;
  int grid_exponent = 0;  ///< gamma = 2^grid_exponent when source == grid
  double radius = 0.0;    ///< R, when source == nonsmooth
  double bound = 0.0;     ///< B, when source == nonsmooth

  static StepSizePlan theoretical(std::size_t n, double L, double mu);
  static StepSizePlan user(double gamma);
  static StepSizePlan grid(int exponent);
  static StepSizePlan nonsmooth(double R, double B, std::size_t n);

  std::string describe() const;
};

}  // namespace psaga

#endif
