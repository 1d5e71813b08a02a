#ifndef PSAGA_LOSSES_HPP
#define PSAGA_LOSSES_HPP

#include "psaga/problem.hpp"

#include <cstddef>

namespace psaga {

/// Scalar loss l(a; y) as a function of the margin-like inner product a = <x, X>.
///   hinge:    max(0, 1 - y a)
///   logistic: log(1 + exp(-y a))
///   squared:  (a - y)^2 / 2
double loss_value(LossKind kind, double a, double y);

/// dl/da, so that the full subgradient of x -> l(<x, X>; y) is loss_subgradient * X.
/// The hinge kink (y a == 1) returns 0.
double loss_subgradient(LossKind kind, double a, double y);

/// Solution of the 1-D prox problem  min_c  gamma_p * l(c; y) + (c - a)^2 / 2.
///
/// `c` is the optimal inner product <x+, X>; `nu` is the loss subgradient at c selected
/// by the optimality condition, so the full-space prox is z - gamma * nu * X. For the
/// hinge this is y times the textbook coefficient in [-1, 0].
struct ProxResult {
  double c = 0.0;
  double nu = 0.0;
  int iterations = 0;  ///< Newton iterations (0 for closed forms)
  int bisections = 0;  ///< iterations where the bracket safeguard replaced the Newton step
};

ProxResult prox_hinge(double a, double y, double gamma_p);

struct NewtonOptions {
  double tol = 1e-10;  ///< on |phi(c)|, phi(c) = gamma_p * l'(c) + c - a
  int max_iter = 40;
};

/// Newton iteration from c = 0 on phi(c) = 0, safeguarded by bisection on the sign-change
/// bracket [a, a + y gamma_p]. Curvature phi'(c) = 1 - gamma_p y s - gamma_p s^2 with
/// s = l'(c). Throws numerical_error (carrying the last bracket) if max_iter is exhausted.
ProxResult prox_logistic(double a, double y, double gamma_p, NewtonOptions options = {});

/// c = (a + gamma_p y) / (1 + gamma_p).
ProxResult prox_squared(double a, double y, double gamma_p);

/// Dispatch on kind. gamma_p must be positive.
ProxResult prox_scalar(LossKind kind, double a, double y, double gamma_p,
                       NewtonOptions options = {});

/// Shrink factor of the L2 fold: 1 / (1 + mu gamma).
inline double fold_factor(double mu, double gamma) { return 1.0 / (1.0 + mu * gamma); }

/// prox of gamma * F_j at z, with F_j = l(<., X_j>; y_j) + mu/2 |.|^2, written into `out`.
/// Computed as prox_{rho gamma l_j}(rho z), rho = fold_factor(mu, gamma); only coordinates
/// in supp(X_j) differ from rho z. `info` receives the scalar solve if non-null.
void prox_term(const Problem &problem, std::size_t j, const Vector &z, double gamma, Vector &out,
               ProxResult *info = nullptr, NewtonOptions newton = {});

Vector prox_term(const Problem &problem, std::size_t j, const Vector &z, double gamma);

}  // namespace psaga

#endif
