#ifndef PSAGA_DIAGNOSTICS_HPP
#define PSAGA_DIAGNOSTICS_HPP

#include "psaga/losses.hpp"
#include "psaga/point_saga.hpp"
#include "psaga/problem.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace psaga {

// ------------------------------------------------------------------ reports

/// Outcome of one executable check. `values` are emitted as `key=value` lines.
struct CheckReport {
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, double>> values;
  std::string note;

  void add(std::string key, double value) { values.emplace_back(std::move(key), value); }
  double get(const std::string &key) const;

  /// Human-readable block followed by `name.key=value` lines.
  std::string text() const;
};

// ------------------------------------------------------------------ synthetic problems

struct SyntheticOptions {
  std::size_t n = 10;
  std::size_t d = 5;
  double density = 1.0;  ///< fraction of stored features per row
  LossKind loss = LossKind::squared;
  double mu = 0.1;
  bool unit_rows = false;  ///< rescale every row to unit norm
  double noise = 0.1;      ///< label noise (squared) or flip probability (classification)
  std::uint64_t seed = 0;
};

/// Random linear model data: rows with N(0,1) entries on a random support, labels from a
/// planted model (sign for classification, linear plus noise for squared).
Problem make_synthetic(const SyntheticOptions &options);

/// Squared loss with unit-norm rows and mu = 1 / (condition - 1), so L / mu == condition.
Problem make_conditioned_quadratic(std::size_t n, std::size_t d, double condition, std::uint64_t seed);

// ------------------------------------------------------------------ reference solution

struct ReferenceSolution {
  Vector x;           ///< minimizer x*
  Eigen::MatrixXd g;  ///< d x n, column i is g_i*, a subgradient of F_i at x*, sum g_i* = 0
  double fstar = 0.0;
  double residual = 0.0;  ///< |grad f(x*)| (smooth) or the worst optimality violation (hinge)
  std::string method;

  /// v_i = x* + gamma g_i*.
  Vector v(std::size_t i, double gamma) const { return x + gamma * g.col(static_cast<Eigen::Index>(i)); }
};

struct ReferenceOptions {
  double tol = 1e-10;
  int max_newton = 100;
  std::size_t max_dual_epochs = 200000;
  std::uint64_t seed = 0;
};

/// squared: regularized normal equations. logistic: damped Newton on the full objective.
/// hinge: dual coordinate ascent, then an exact solve on the set of examples sitting at the
/// kink; the dual weights give the selection alpha_i in [0, 1] with g_i* = -alpha_i y_i X_i +
/// mu x*, which sums to zero by construction. Requires mu > 0. Throws numerical_error if tol
/// is not reached.
ReferenceSolution solve_reference(const Problem &problem, const ReferenceOptions &options = {});

// ------------------------------------------------------------------ Lyapunov

struct LyapunovSample {
  double T = 0.0;
  double c = 0.0;  ///< 1 / (mu L)
  double table_term = 0.0;
  double distance_term = 0.0;
};

/// T = (c/n) sum |g_i - g_i*|^2 + |x - x*|^2 with c = 1 / (mu L).
LyapunovSample lyapunov(const Vector &x, const Eigen::MatrixXd &g, const ReferenceSolution &ref, double mu,
                        double L);
LyapunovSample lyapunov(const PointSaga &state, const ReferenceSolution &ref, double mu, double L);

/// Monte-Carlo estimate of E[T^{k+1}] / T^k from the given state: `trials` independent
/// single steps with per-trial index streams derived from `seed`. Passes when the estimate is
/// at most (1 - kappa) + 3 standard errors. Also reports the exact expectation (average over
/// every j). The state is not modified.
CheckReport check_descent(const PointSaga &state, const ReferenceSolution &ref, std::size_t trials,
                          std::uint64_t seed);

/// Same, from a random state around the reference: x = x* + s xi, g_i = g_i* + s sqrt(mu L) xi_i,
/// with full table storage at the theoretical step size.
CheckReport check_descent(const Problem &problem, const ReferenceSolution &ref, std::size_t trials,
                          std::uint64_t seed, double spread = 1.0);

/// mean over seeds of |x^k - x*|^2 vs (1 - kappa)^k (mu + L)/mu |x0 - x*|^2 at each k, subgradient
/// init, theoretical step size. Passes if every mean is within 3 standard errors of the bound.
CheckReport check_chained_rate(const Problem &problem, const ReferenceSolution &ref, const Vector &x0,
                               const std::vector<std::size_t> &ks, std::size_t seeds, std::uint64_t root_seed);

/// Averaged mode at gamma = R / (B sqrt(n)) from x0 = 0 and a zero table. R and B default
/// (when <= 0) to |x*| and max_i |g_i*|. Reports k E|xbar^k - x*|^2 at each k over `seeds`
/// runs and passes if max/min <= max_spread.
CheckReport check_nonsmooth_rate(const Problem &problem, const ReferenceSolution &ref,
                                 const std::vector<std::size_t> &ks, std::size_t seeds, std::uint64_t root_seed,
                                 double R = 0.0, double B = 0.0, double max_spread = 3.0);

// ------------------------------------------------------------------ operator checks

/// For `pairs` random folded logistic/squared terms and random point pairs:
///   <x - y, p(x) - p(y)> >= (1 + mu gamma) |p(x) - p(y)|^2
///   <g(x) - g(y), x - y> >= gamma (1 + 1/(L gamma)) |g(x) - g(y)|^2,  g(x) = (x - p(x)) / gamma
///   |g(x) - grad F(p(x))| small.
/// Passes if no inequality is violated by more than `slack`.
CheckReport check_operator_inequalities(std::size_t pairs, std::uint64_t seed, double slack = 1e-9);

/// prox of a convex function and of its conjugate, both on R^d.
struct ProxPair {
  std::string name;
  std::size_t dim = 1;
  std::function<Vector(const Vector &x, double t)> prox_f;     ///< prox_{t f}
  std::function<Vector(const Vector &u, double t)> prox_conj;  ///< prox_{t f*}
};

/// q |x|^2 / 2 (self-conjugate at q = 1), the zero function, |x|_1, and the 1-D hinge for both
/// labels.
std::vector<ProxPair> known_conjugate_pairs();

/// Residual of p_{gamma f}(x) = x - gamma p_{f*/gamma}(x / gamma) and of
/// p_{f*/gamma}(x / gamma) = (x - p_{gamma f}(x)) / gamma over random x and gamma.
CheckReport check_moreau(const std::vector<ProxPair> &pairs, std::size_t samples, std::uint64_t seed,
                         double tol = 1e-10);

// ------------------------------------------------------------------ scalar oracle

/// Golden-section minimization of gamma_p l(c; y) + (c - a)^2 / 2 to bracket width tol.
/// Points are compared through differences computed without cancellation, so the result is
/// accurate to about tol even for large gamma_p. The starting bracket comes from the
/// subgradient bound |l'| <= 1 (hinge, logistic) or lies between a and y (squared).
double brute_force_prox_1d(LossKind loss, double a, double y, double gamma_p, double tol = 1e-12);

/// Same, with an explicit starting bracket. Throws argument_error if lo > hi.
double brute_force_prox_1d(LossKind loss, double a, double y, double gamma_p, double lo, double hi, double tol);

/// Max |c - oracle| over `samples` random (a, y, gamma_p) per loss, gamma_p log-uniform in
/// [gamma_lo, gamma_hi]. Passes if below tol.
CheckReport check_prox_oracle(std::size_t samples, std::uint64_t seed, double gamma_lo = 1e-6,
                              double gamma_hi = 1e3, double tol = 1e-8);

/// Iteration statistics of prox_logistic on random instances with gamma_p <= 10, counting
/// Newton and bisection steps alike: passes if the median is <= 3 and the max <= 12.
CheckReport check_newton_iterations(std::size_t samples, std::uint64_t seed);

}  // namespace psaga

#endif
