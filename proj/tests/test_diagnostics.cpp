#include "helpers.hpp"

#include <psaga/diagnostics.hpp>
#include <psaga/error.hpp>
#include <psaga/step_size.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace psaga;

namespace {

Problem synthetic(LossKind loss, std::size_t n, std::size_t d, double mu, std::uint64_t seed, bool unit = false) {
  SyntheticOptions o;
  o.n = n;
  o.d = d;
  o.loss = loss;
  o.mu = mu;
  o.unit_rows = unit;
  o.seed = seed;
  return make_synthetic(o);
}

}  // namespace

class ReferenceInvariants : public ::testing::TestWithParam<LossKind> {};

TEST_P(ReferenceInvariants, FixedPointProperties) {
  const LossKind loss = GetParam();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Problem p = synthetic(loss, 40, 6, 0.05, seed);
    const ReferenceSolution ref = solve_reference(p);
    const double n = static_cast<double>(p.n());
    EXPECT_LE(ref.g.rowwise().sum().norm(), 1e-8 * n);
    EXPECT_NEAR(ref.fstar, objective(p, ref.x), 1e-14);
    for (std::size_t i = 0; i < p.n(); ++i) {
      if (p.smooth()) EXPECT_LE((ref.g.col(static_cast<Eigen::Index>(i)) - term_gradient(p, i, ref.x)).norm(), 1e-8);
      for (double gamma : {0.01, 1.0, 30.0}) EXPECT_LE((prox_term(p, i, ref.v(i, gamma), gamma) - ref.x).norm(), 1e-8);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllLosses, ReferenceInvariants,
                         ::testing::Values(LossKind::squared, LossKind::logistic, LossKind::hinge),
                         [](const auto &info) { return std::string(to_string(info.param)); });

TEST(Reference, RidgeMatchesDirectSolve) {
  const Problem p = synthetic(LossKind::squared, 50, 10, 0.1, 3);
  Eigen::MatrixXd A(50, 10);
  Vector y(50);
  for (std::size_t i = 0; i < 50; ++i) {
    A.row(static_cast<Eigen::Index>(i)) = p.data->row(i).to_dense(10).transpose();
    y[static_cast<Eigen::Index>(i)] = p.data->label(i);
  }
  Eigen::MatrixXd H = A.transpose() * A / 50.0;
  H.diagonal().array() += 0.1;
  const Vector direct = H.colPivHouseholderQr().solve(A.transpose() * y / 50.0);
  EXPECT_LE((solve_reference(p).x - direct).norm(), 1e-12);
}

TEST(Reference, LogisticResidual) {
  const Problem p = synthetic(LossKind::logistic, 20, 4, 0.01, 4);
  const ReferenceSolution ref = solve_reference(p);
  EXPECT_LE(full_gradient(p, ref.x).norm(), 1e-10);
}

TEST(Reference, HingeHasBalancedSelection) {
  const Problem p = synthetic(LossKind::hinge, 200, 10, 1e-2, 5, true);
  const ReferenceSolution ref = solve_reference(p);
  EXPECT_LE(ref.residual, 1e-10);
  std::size_t kinks = 0;
  for (std::size_t i = 0; i < p.n(); ++i) {
    const double m = p.data->label(i) * p.data->row(i).dot(ref.x);
    if (std::abs(m - 1.0) < 1e-9) ++kinks;
  }
  EXPECT_GT(kinks, 0u);  // the selection freedom is actually exercised
}

TEST(Reference, RequiresStrongConvexity) {
  EXPECT_THROW(solve_reference(synthetic(LossKind::squared, 5, 2, 0.0, 1)), argument_error);
}

TEST(Lyapunov, ZeroAtFixedPoint) {
  const Problem p = synthetic(LossKind::logistic, 10, 3, 0.1, 1);
  const ReferenceSolution ref = solve_reference(p);
  const LyapunovSample s = lyapunov(ref.x, ref.g, ref, p.mu, p.smoothness);
  EXPECT_EQ(s.T, 0.0);
  EXPECT_DOUBLE_EQ(s.c, 1.0 / (p.mu * p.smoothness));
}

TEST(Lyapunov, TableTermIsQuadratic) {
  const Problem p = synthetic(LossKind::squared, 10, 3, 0.1, 2);
  const ReferenceSolution ref = solve_reference(p);
  const Eigen::MatrixXd err = Eigen::MatrixXd::Random(3, 10);
  const Vector x = ref.x + Vector::Random(3);
  const LyapunovSample a = lyapunov(x, ref.g + err, ref, p.mu, p.smoothness);
  const LyapunovSample b = lyapunov(x, ref.g + 2 * err, ref, p.mu, p.smoothness);
  EXPECT_NEAR(b.table_term, 4 * a.table_term, 1e-12 * b.table_term);
  EXPECT_DOUBLE_EQ(a.distance_term, b.distance_term);
  EXPECT_DOUBLE_EQ(a.T, a.table_term + a.distance_term);
  EXPECT_NEAR(a.table_term, a.c / 10.0 * err.squaredNorm(), 1e-12 * a.table_term);
}

TEST(Lyapunov, SubgradientInitBound) {
  // T0 <= ((mu + L) / mu) |x0 - x*|^2 with g_i^0 = F_i'(x0).
  Rng rng(12);
  for (int rep = 0; rep < 40; ++rep) {
    const LossKind loss = rep % 2 ? LossKind::logistic : LossKind::squared;
    const Problem p = synthetic(loss, 5 + rng.bounded(30), 2 + rng.bounded(6), std::exp(rng.uniform(-6.0, 0.0)), rep);
    const ReferenceSolution ref = solve_reference(p);
    PointSagaOptions o;
    o.gamma = 1.0;
    o.init = InitMode::subgradient;
    Vector x0(static_cast<Eigen::Index>(p.d()));
    for (Eigen::Index k = 0; k < x0.size(); ++k) x0[k] = rng.normal() * 3;
    o.x0 = x0;
    const PointSaga s(p, o);
    const LyapunovSample T = lyapunov(s, ref, p.mu, p.smoothness);
    EXPECT_LE(T.T, (p.mu + p.smoothness) / p.mu * (x0 - ref.x).squaredNorm() * (1 + 1e-12));
  }
}

TEST(Descent, QuadraticPasses) {
  const Problem p = make_conditioned_quadratic(10, 5, 100.0, 0);
  const ReferenceSolution ref = solve_reference(p);
  const CheckReport r = check_descent(p, ref, 2000, 1);
  EXPECT_TRUE(r.pass) << r.text();
}

TEST(Descent, FixedPointIsStable) {
  const Problem p = make_conditioned_quadratic(10, 5, 100.0, 0);
  const ReferenceSolution ref = solve_reference(p);
  PointSagaOptions o;
  o.gamma = step_size_default(p.n(), p.smoothness, p.mu);
  PointSaga s(p, o);
  s.set_state(ref.x, ref.g);
  const LyapunovSample T = lyapunov(s, ref, p.mu, p.smoothness);
  if (T.T == 0.0) {
    const CheckReport r = check_descent(s, ref, 100, 1);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.get("T0"), 0.0);
  }
  // one step from the fixed point stays there
  s.step(3);
  EXPECT_LE((s.x() - ref.x).norm(), 1e-12);
}

TEST(Descent, ExactExpectationContractsFromRandomStates) {
  // The n-point average over j is the exact expectation, so no statistical slack is needed.
  Rng rng(31);
  for (int rep = 0; rep < 30; ++rep) {
    const LossKind loss = rep % 2 ? LossKind::logistic : LossKind::squared;
    const Problem p = synthetic(loss, 3 + rng.bounded(20), 2 + rng.bounded(5), std::exp(rng.uniform(-5.0, -1.0)), rep);
    const ReferenceSolution ref = solve_reference(p);
    const CheckReport r = check_descent(p, ref, 10, rep, std::exp(rng.uniform(-3.0, 2.0)));
    EXPECT_LE(r.get("exact_ratio"), r.get("bound") * (1 + 1e-9)) << r.text();
  }
}

TEST(ChainedRate, SmallRun) {
  const Problem p = make_conditioned_quadratic(10, 5, 100.0, 0);
  const ReferenceSolution ref = solve_reference(p);
  const CheckReport r = check_chained_rate(p, ref, Vector::Zero(5), {50, 200}, 8, 3);
  EXPECT_TRUE(r.pass) << r.text();
  EXPECT_LE(r.get("T0_over_bound"), 1.0);
}

TEST(OperatorInequalities, SmallRun) {
  const CheckReport r = check_operator_inequalities(2000, 5);
  EXPECT_TRUE(r.pass) << r.text();
}

TEST(Moreau, QuadraticHalves) {
  int found = 0;
  for (const ProxPair &pp : known_conjugate_pairs()) {
    if (pp.name != "quadratic_q1.00") continue;
    ++found;
    Vector x = Vector::LinSpaced(static_cast<Eigen::Index>(pp.dim), -2.0, 3.0);
    EXPECT_LE((pp.prox_f(x, 1.0) - x / 2).norm(), 1e-15);
    EXPECT_LE((pp.prox_conj(x, 1.0) - x / 2).norm(), 1e-15);
  }
  EXPECT_EQ(found, 1);
}

TEST(Moreau, ZeroFunctionIsIdentity) {
  for (const ProxPair &pp : known_conjugate_pairs()) {
    if (pp.name != "zero") continue;
    Vector x = Vector::LinSpaced(static_cast<Eigen::Index>(pp.dim), -2.0, 3.0);
    EXPECT_EQ(pp.prox_f(x, 1.0), x);
    // f* is the indicator of {0}; its prox is the zero map
    EXPECT_EQ(pp.prox_conj(x, 1.0).norm(), 0.0);
  }
}

TEST(Moreau, KnownPairsSatisfyIdentity) {
  const CheckReport r = check_moreau(known_conjugate_pairs(), 100, 9);
  EXPECT_TRUE(r.pass) << r.text();
}

TEST(BruteForce, Examples) {
  EXPECT_NEAR(brute_force_prox_1d(LossKind::squared, 0.0, 1.0, 1.0), 0.5, 1e-10);
  EXPECT_NEAR(brute_force_prox_1d(LossKind::hinge, 0.5, 1.0, 1.0), 1.0, 1e-10);
  EXPECT_THROW(brute_force_prox_1d(LossKind::hinge, 0.5, 1.0, 1.0, 2.0, 1.0, 1e-12), argument_error);
}

TEST(BruteForce, StableUnderBracketPerturbation) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const double a = rng.normal() * 3, y = rng.uniform() < 0.5 ? -1.0 : 1.0, gp = std::exp(rng.uniform(-3.0, 3.0));
    for (LossKind loss : {LossKind::hinge, LossKind::logistic}) {
      const double base = brute_force_prox_1d(loss, a, y, gp);
      const double lo = std::min(a, a + y * gp) - rng.uniform(0.0, 5.0);
      const double hi = std::max(a, a + y * gp) + rng.uniform(0.0, 5.0);
      EXPECT_NEAR(brute_force_prox_1d(loss, a, y, gp, lo, hi, 1e-12), base, 1e-10);
    }
  }
}

TEST(Synthetic, ConditionedQuadratic) {
  const Problem p = make_conditioned_quadratic(10, 5, 100.0, 3);
  EXPECT_NEAR(p.condition_number(), 100.0, 1e-10);
  for (const SparseVec &row : p.data->rows()) EXPECT_NEAR(row.squared_norm(), 1.0, 1e-14);
}

TEST(Report, TextFormat) {
  CheckReport r;
  r.name = "demo";
  r.pass = true;
  r.add("x", 1.5);
  EXPECT_EQ(r.text(), "[PASS] demo\ndemo.x=1.5\n");
  EXPECT_EQ(r.get("x"), 1.5);
  EXPECT_TRUE(std::isnan(r.get("y")));
}
