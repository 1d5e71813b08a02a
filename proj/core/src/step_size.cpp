#include "psaga/step_size.hpp"

#include "psaga/error.hpp"

#include <cmath>

namespace psaga {

double step_size_default(std::size_t n, double L, double mu) {
  if (n < 1) throw argument_error("step_size_default: n must be >= 1");
  if (!std::isfinite(L)) throw argument_error("step_size_default: L is infinite (non-smooth loss); supply gamma");
  if (!(mu > 0.0)) throw argument_error("step_size_default: requires mu > 0; supply gamma");
  if (!(mu < L)) throw argument_error("step_size_default: requires mu < L; supply gamma manually");
  const double nd = static_cast<double>(n);
  const double root = std::sqrt((nd - 1.0) * (nd - 1.0) + 4.0 * nd * L / mu);
  return root / (2.0 * L * nd) - (1.0 - 1.0 / nd) / (2.0 * L);
}

double kappa(double mu, double gamma) { return mu * gamma / (1.0 + mu * gamma); }

double nonsmooth_step_size(double R, double B, std::size_t n) {
  if (!(R > 0.0) || !(B > 0.0)) throw argument_error("nonsmooth_step_size: R and B must be positive");
  if (n < 1) throw argument_error("nonsmooth_step_size: n must be >= 1");
  return R / (B * std::sqrt(static_cast<double>(n)));
}

StepSizePlan StepSizePlan::theoretical(std::size_t n, double L, double mu) {
  StepSizePlan p;
  p.gamma = step_size_default(n, L, mu);
  p.source = Source::theoretical;
  return p;
}

StepSizePlan StepSizePlan::user(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw argument_error("step size must be positive");
  StepSizePlan p;
  p.gamma = gamma;
  p.source = Source::user;
  return p;
}

StepSizePlan StepSizePlan::grid(int exponent) {
  StepSizePlan p;
  p.gamma = std::ldexp(1.0, exponent);
  p.source = Source::grid;
  p.grid_exponent = exponent;
  return p;
}

StepSizePlan StepSizePlan::nonsmooth(double R, double B, std::size_t n) {
  StepSizePlan p;
  p.gamma = nonsmooth_step_size(R, B, n);
  p.source = Source::nonsmooth;
  p.radius = R;
  p.bound = B;
  return p;
}

std::string StepSizePlan::describe() const {
  switch (source) {
    case Source::theoretical:
      return "theoretical";
    case Source::user:
      return "user";
    case Source::grid:
      return "grid:2^" + std::to_string(grid_exponent);
    case Source::nonsmooth:
      return "nonsmooth";
  }
  return "unknown";
}

}  // namespace psaga
