#include "psaga/losses.hpp"

#include "psaga/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace psaga {

namespace {

// 1 / (1 + exp(t)) without overflow.
double logistic_tail(double t) {
  if (t > 0.0) {
    const double e = std::exp(-t);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(t));
}

void require_positive_gamma(double gamma_p) {
  if (!(gamma_p > 0.0)) throw argument_error("prox: gamma_p must be positive");
}

}  // namespace

double loss_value(LossKind kind, double a, double y) {
  switch (kind) {
    case LossKind::hinge:
      return std::max(0.0, 1.0 - y * a);
    case LossKind::logistic: {
      const double t = -y * a;
      return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    }
    case LossKind::squared:
      return 0.5 * (a - y) * (a - y);
  }
  throw argument_error("unknown loss kind");
}

double loss_subgradient(LossKind kind, double a, double y) {
  switch (kind) {
    case LossKind::hinge:
      return 1.0 - y * a > 0.0 ? -y : 0.0;
    case LossKind::logistic:
      return -y * logistic_tail(y * a);
    case LossKind::squared:
      return a - y;
  }
  throw argument_error("unknown loss kind");
}

ProxResult prox_hinge(double a, double y, double gamma_p) {
  require_positive_gamma(gamma_p);
  const double s = (1.0 - y * a) / gamma_p;
  double coeff = -s;
  if (s >= 1.0)
    coeff = -1.0;
  else if (s <= 0.0)
    coeff = 0.0;
  return {a - gamma_p * y * coeff, y * coeff, 0, 0};
}

ProxResult prox_logistic(double a, double y, double gamma_p, NewtonOptions options) {
  require_positive_gamma(gamma_p);
  // The root lies strictly between a and a + y * gamma_p since |l'| < 1 with sign -y.
  double lo = std::min(a, a + y * gamma_p);
  double hi = std::max(a, a + y * gamma_p);

  ProxResult r;
  double c = 0.0;
  for (int it = 0; it <= options.max_iter; ++it) {
    const double p = logistic_tail(y * c);
    const double s = -y * p;
    const double phi = gamma_p * s + c - a;
    if (std::abs(phi) <= options.tol) {
      r.c = c;
      r.nu = s;
      return r;
    }
    if (phi < 0.0 && c > lo) lo = c;
    if (phi > 0.0 && c < hi) hi = c;
    if (it == options.max_iter) break;

    const double curvature = 1.0 - gamma_p * y * s - gamma_p * s * s;
    double next = c - phi / curvature;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
      ++r.bisections;
    } else {
      ++r.iterations;
    }
    if (next == c || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(c))) {
      // Bracket collapsed to rounding level; phi cannot be reduced further.
      const double pn = logistic_tail(y * next);
      r.c = next;
      r.nu = -y * pn;
      return r;
    }
    c = next;
  }
  throw numerical_error("prox_logistic: Newton iteration did not reach tolerance", lo, hi);
}

ProxResult prox_squared(double a, double y, double gamma_p) {
  require_positive_gamma(gamma_p);
  const double c = (a + gamma_p * y) / (1.0 + gamma_p);
  return {c, c - y, 0, 0};
}

ProxResult prox_scalar(LossKind kind, double a, double y, double gamma_p, NewtonOptions options) {
  switch (kind) {
    case LossKind::hinge:
      return prox_hinge(a, y, gamma_p);
    case LossKind::logistic:
      return prox_logistic(a, y, gamma_p, options);
    case LossKind::squared:
      return prox_squared(a, y, gamma_p);
  }
  throw argument_error("unknown loss kind");
}

void prox_term(const Problem &problem, std::size_t j, const Vector &z, double gamma, Vector &out,
               ProxResult *info, NewtonOptions newton) {
  if (!(gamma > 0.0)) throw argument_error("prox_term: gamma must be positive");
  const double rho = fold_factor(problem.mu, gamma);
  out = rho * z;
  const SparseVec &row = problem.data->row(j);
  const double norm2 = row.squared_norm();
  if (norm2 == 0.0) {
    if (info != nullptr) *info = {};
    return;
  }
  const double a = row.dot(out);
  const ProxResult r = prox_scalar(problem.loss, a, problem.data->label(j), rho * gamma * norm2, newton);
  row.axpy(-(a - r.c) / norm2, out);
  if (info != nullptr) *info = r;
}

Vector prox_term(const Problem &problem, std::size_t j, const Vector &z, double gamma) {
  Vector out;
  prox_term(problem, j, z, gamma, out);
  return out;
}

}  // namespace psaga
