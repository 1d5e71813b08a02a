#include "helpers.hpp"

#include <psaga/data.hpp>
#include <psaga/error.hpp>
#include <psaga/problem.hpp>
#include <psaga/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

using namespace psaga;

namespace {

Dataset parse(const std::string &text, const ParseOptions &options = {}) {
  std::istringstream in(text);
  return parse_libsvm(in, options);
}

Dataset random_dataset(Rng &rng, std::size_t n, std::size_t d, double density, bool raw_labels) {
  std::vector<SparseVec> rows;
  std::vector<double> labels;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<SparseVec::index_type> idx;
    std::vector<double> val;
    for (std::size_t k = 0; k < d; ++k)
      if (rng.uniform() < density) {
        idx.push_back(static_cast<SparseVec::index_type>(k));
        val.push_back(rng.normal() * std::pow(10.0, rng.uniform(-5.0, 5.0)));
      }
    rows.emplace_back(std::move(idx), std::move(val));
    labels.push_back(raw_labels ? rng.normal() / 3.0 : (rng.uniform() < 0.5 ? -1.0 : 1.0));
  }
  return Dataset(std::move(rows), std::move(labels), d);
}

}  // namespace

TEST(Parse, SingleRow) {
  const Dataset ds = parse("+1 1:0.5 3:-2\n");
  ASSERT_EQ(ds.n(), 1u);
  EXPECT_EQ(ds.d(), 3u);
  EXPECT_EQ(ds.label(0), 1.0);
  const auto idx = ds.row(0).indices();
  const auto val = ds.row(0).values();
  ASSERT_EQ(idx.size(), 2u);
  EXPECT_EQ(idx[0], 0u);
  EXPECT_EQ(idx[1], 2u);
  EXPECT_EQ(val[0], 0.5);
  EXPECT_EQ(val[1], -2.0);
  EXPECT_DOUBLE_EQ(ds.row(0).squared_norm(), 4.25);
}

TEST(Parse, EmptyRow) {
  const Dataset ds = parse("-1\n");
  ASSERT_EQ(ds.n(), 1u);
  EXPECT_EQ(ds.label(0), -1.0);
  EXPECT_TRUE(ds.row(0).empty());
}

TEST(Parse, MalformedValueNamesLine) {
  try {
    parse("1 3:abc\n");
    FAIL() << "expected parse_error";
  } catch (const parse_error &e) {
    EXPECT_EQ(e.line(), 1u);
  }
  try {
    parse("1 1:1\n# comment\n-1 2:1 2:3\n");
    FAIL() << "expected parse_error";
  } catch (const parse_error &e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Parse, RejectsZeroIndexAndBadLabels) {
  EXPECT_THROW(parse("1 0:1\n"), parse_error);
  EXPECT_THROW(parse("2 1:1\n"), parse_error);
  EXPECT_THROW(parse("1 1:1 x\n"), parse_error);
}

TEST(Parse, CommentsAndBlankLines) {
  const Dataset ds = parse("# header\n\n+1 2:1 # trailing\n-1 1:3\n");
  ASSERT_EQ(ds.n(), 2u);
  EXPECT_EQ(ds.d(), 2u);
  EXPECT_EQ(ds.row(1).indices()[0], 0u);
}

TEST(Parse, LabelMap) {
  ParseOptions opts;
  opts.label_map = parse_label_map("1:1,2:-1");
  const Dataset ds = parse("1 1:1\n2 2:1\n", opts);
  EXPECT_EQ(ds.label(0), 1.0);
  EXPECT_EQ(ds.label(1), -1.0);
  EXPECT_THROW(parse("3 1:1\n", opts), parse_error);
  EXPECT_THROW(parse_label_map("1:"), argument_error);
  EXPECT_EQ(format_label_map(opts.label_map), "1:1,2:-1");
}

TEST(Parse, MinDimRaisesFeatureCount) {
  ParseOptions opts;
  opts.min_dim = 10;
  EXPECT_EQ(parse("1 2:1\n", opts).d(), 10u);
}

TEST(Parse, ExplicitZerosDoNotChangeNormOrDot) {
  const Dataset ds = parse("1 1:0 2:3 3:0\n");
  EXPECT_EQ(ds.row(0).squared_norm(), 9.0);
  Vector x(3);
  x << 5.0, 2.0, 7.0;
  EXPECT_EQ(ds.row(0).dot(x), 6.0);
}

TEST(SparseVecTest, RejectsBadInput) {
  EXPECT_THROW(SparseVec({1, 1}, {1.0, 2.0}), argument_error);
  EXPECT_THROW(SparseVec({2, 1}, {1.0, 2.0}), argument_error);
  EXPECT_THROW(SparseVec({0}, {1.0, 2.0}), argument_error);
  EXPECT_THROW(SparseVec({0}, {NAN}), argument_error);
}

TEST(DatasetTest, CachedNormsMatchRecomputed) {
  Rng rng(5);
  const Dataset ds = random_dataset(rng, 200, 50, 0.3, false);
  double max_sq = 0.0;
  for (const SparseVec &row : ds.rows()) {
    double s = 0.0;
    for (double v : row.values()) s += v * v;
    EXPECT_LE(std::abs(row.squared_norm() - s), 1e-12 * std::max(1.0, s));
    max_sq = std::max(max_sq, s);
  }
  EXPECT_LE(std::abs(ds.max_squared_norm() - max_sq), 1e-12 * max_sq);
}

TEST(DatasetTest, WithDimension) {
  const Dataset ds = parse("1 2:1\n");
  EXPECT_EQ(ds.with_dimension(7).d(), 7u);
  EXPECT_THROW(ds.with_dimension(1), argument_error);
}

TEST(RoundTrip, WriteThenParseIsIdentity) {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Dataset ds = random_dataset(rng, 1 + rng.bounded(40), 1 + rng.bounded(30), 0.4, true);
    std::ostringstream out;
    write_libsvm(out, ds);
    ParseOptions opts;
    opts.raw_labels = true;
    opts.min_dim = ds.d();
    EXPECT_TRUE(parse(out.str(), opts) == ds) << "rep " << rep;
  }
}

TEST(RoundTrip, GzipFile) {
  const auto path = std::filesystem::path(PSAGA_DATA_DIR) / "mushrooms_desk.libsvm.gz";
  const Dataset ds = read_libsvm(path);
  EXPECT_EQ(ds.n(), 5644u);
  EXPECT_EQ(ds.d(), 98u);
}

TEST(Subsample, FullFractionIsIdentity) {
  Rng rng(1);
  const Dataset ds = random_dataset(rng, 37, 8, 0.5, false);
  for (std::uint64_t seed : {0u, 1u, 99u}) EXPECT_TRUE(subsample(ds, 1.0, seed) == ds);
}

TEST(Subsample, SizeAndDistinctness) {
  const auto idx = subsample_indices(100, 0.1, 3);
  ASSERT_EQ(idx.size(), 10u);
  EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 10u);
  for (std::size_t i : idx) EXPECT_LT(i, 100u);
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
}

TEST(Subsample, Deterministic) {
  EXPECT_EQ(subsample_indices(1000, 0.05, 42), subsample_indices(1000, 0.05, 42));
  EXPECT_NE(subsample_indices(1000, 0.05, 42), subsample_indices(1000, 0.05, 43));
}

TEST(Subsample, RejectsBadFractions) {
  EXPECT_THROW(subsample_indices(10, 0.0, 0), argument_error);
  EXPECT_THROW(subsample_indices(10, -0.5, 0), argument_error);
  EXPECT_THROW(subsample_indices(10, 1.5, 0), argument_error);
}

TEST(Subsample, CeilSizeOnRandomN) {
  Rng rng(8);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rng.bounded(100000);
    for (const auto &[f, num] : {std::pair{0.05, 5}, std::pair{0.10, 10}, std::pair{1.0, 100}}) {
      // ceil(num * n / 100) in exact integer arithmetic
      const std::size_t expected = (static_cast<std::size_t>(num) * n + 99) / 100;
      ASSERT_EQ(subsample_size(n, f), expected) << "n=" << n << " f=" << f;
      if (n <= 2000) ASSERT_EQ(subsample_indices(n, f, rep).size(), expected);
    }
  }
}

TEST(Subsample, UniformInclusion) {
  // Each index should be kept with probability k/n.
  const std::size_t n = 20, trials = 20000;
  std::vector<int> hits(n, 0);
  for (std::size_t t = 0; t < trials; ++t)
    for (std::size_t i : subsample_indices(n, 0.25, t)) ++hits[i];
  const double p = 5.0 / 20.0, sd = std::sqrt(trials * p * (1 - p));
  for (int h : hits) EXPECT_LT(std::abs(h - trials * p), 5 * sd);
}

TEST(ScaleFeatures, MapsToUnitBox) {
  const Dataset ds = parse("1 1:2 2:5\n-1 1:4 2:5\n1 1:3\n");
  const Dataset s = scale_features(ds);
  EXPECT_EQ(s.row(0).values()[0], -1.0);
  EXPECT_EQ(s.row(1).values()[0], 1.0);
}

TEST(DeriveConstants, Examples) {
  Eigen::MatrixXd A(2, 2);
  A << 2, 0, 1, 1;  // max |X|^2 = 4
  const Problem sq = test::dense_problem(A, {1.0, -1.0}, LossKind::squared, 0.5);
  EXPECT_DOUBLE_EQ(sq.smoothness, 4.5);
  const Problem lg = test::dense_problem(A, {1.0, -1.0}, LossKind::logistic, 0.0);
  EXPECT_DOUBLE_EQ(lg.smoothness, 1.0);
  const Problem hg = test::dense_problem(A, {1.0, -1.0}, LossKind::hinge, 0.1);
  EXPECT_FALSE(hg.smooth());
  EXPECT_THROW(test::dense_problem(A, {2.0, -1.0}, LossKind::logistic, 0.0), argument_error);
  EXPECT_THROW(test::dense_problem(A, {1.0, -1.0}, LossKind::squared, -1.0), argument_error);
}

TEST(DeriveConstants, FiniteDifferenceHessianProbe) {
  // The curvature of F_i along X_i/|X_i| at the point of maximal loss curvature equals L.
  Eigen::MatrixXd A(1, 2);
  A << 2, 0;
  const double mu = 0.5;
  for (LossKind loss : {LossKind::squared, LossKind::logistic}) {
    const Problem p = test::dense_problem(A, {1.0}, loss, loss == LossKind::squared ? mu : 0.0);
    Vector u(2);
    u << 1.0, 0.0;
    const Vector x0 = Vector::Zero(2);
    const double h = 1e-5;
    const double curv = (term_gradient(p, 0, x0 + h * u) - term_gradient(p, 0, x0 - h * u)).dot(u) / (2 * h);
    EXPECT_NEAR(curv, p.smoothness, 1e-6) << to_string(loss);
  }
}

TEST(DeriveConstants, LogisticLipschitzRatio) {
  Rng rng(21);
  Eigen::MatrixXd A(30, 6);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
  std::vector<double> y(30);
  for (double &v : y) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const Problem p = test::dense_problem(A, y, LossKind::logistic, 0.01);
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t i = rng.bounded(p.n());
    Vector a(6), b(6);
    for (int k = 0; k < 6; ++k) {
      a[k] = rng.normal() * 2.0;
      b[k] = a[k] + rng.normal() * std::pow(10.0, rng.uniform(-4.0, 0.0));
    }
    const double ratio = (term_gradient(p, i, a) - term_gradient(p, i, b)).norm() / (a - b).norm();
    worst = std::max(worst, ratio);
  }
  EXPECT_LE(worst, p.smoothness * (1 + 1e-9));
  EXPECT_GT(worst, 0.5 * p.smoothness);  // the bound is not vacuous
}

TEST(LossNames, RoundTrip) {
  for (LossKind k : {LossKind::hinge, LossKind::logistic, LossKind::squared}) EXPECT_EQ(parse_loss(to_string(k)), k);
  EXPECT_THROW(parse_loss("huber"), argument_error);
}

TEST(RngTest, ReproducibleAndBounded) {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next(), b.next());
  Rng r(7);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LT(r.bounded(13), 13u);
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(9, 4), derive_seed(9, 4));
}

TEST(RngTest, FrozenStream) {
  // The mt19937_64 output fixed by the C++ standard: the 10000th draw from the default seed.
  std::mt19937_64 reference;
  reference.discard(9999);
  EXPECT_EQ(reference(), 9981545732273789042ULL);
  Rng r(5489);
  for (int i = 0; i < 9999; ++i) r.next();
  EXPECT_EQ(r.next(), 9981545732273789042ULL);
}
