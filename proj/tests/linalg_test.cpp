#include <gtest/gtest.h>

#include <cmath>

#include "slca/errors.hpp"
#include "slca/linalg.hpp"
#include "support/oracles.hpp"

namespace slca {
namespace {

double reconstruction_error(const Matrix& l, const Matrix& target) {
  const Matrix llt = matmul(l, transpose(l));
  Matrix diff = llt;
  for (std::size_t i = 0; i < diff.flat().size(); ++i) diff.flat()[i] -= target.flat()[i];
  return frobenius_norm(diff) / frobenius_norm(target);
}

TEST(Cholesky, IdentityIsItsOwnFactor) {
  EXPECT_EQ(cholesky(Matrix::identity(3), 0.0), Matrix::identity(3));
}

TEST(Cholesky, DiagonalTakesSquareRoots) {
  const Matrix l = cholesky(Matrix{{4, 0}, {0, 1}}, 0.0);
  EXPECT_EQ(l, (Matrix{{2, 0}, {0, 1}}));
}

TEST(Cholesky, ReconstructsRandomSpd) {
  Rng rng(11);
  const Matrix a = testing::random_spd(5, rng);
  const Matrix l = cholesky(a, 0.0);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) EXPECT_EQ(l(i, j), 0.0);
  EXPECT_LT(reconstruction_error(l, a), 1e-6);
}

TEST(Cholesky, ReconstructsUpToDimension64) {
  Rng rng(5);
  for (std::size_t d : {1u, 2u, 7u, 16u, 33u, 64u}) {
    const Matrix a = testing::random_spd(d, rng);
    EXPECT_LT(reconstruction_error(cholesky(a), a), 1e-6) << "d=" << d;
  }
}

TEST(Cholesky, JitterIsAddedToDiagonal) {
  const Matrix a{{1, 0}, {0, 1}};
  const Matrix l = cholesky(a, 3.0);
  EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(l(1, 1), 2.0);
}

TEST(Cholesky, RejectsIndefiniteAndAsymmetric) {
  EXPECT_THROW(cholesky(Matrix{{1, 2}, {2, 1}}), NotPositiveDefinite);
  EXPECT_THROW(cholesky(Matrix{{1, 0.5}, {0.0, 1}}), InvalidArgument);
  EXPECT_THROW(cholesky(Matrix(2, 3)), DimensionMismatch);
}

TEST(CholeskyJittered, RankDeficientSucceedsWithSmallJitter) {
  // Rank one: [1 1; 1 1].
  const Matrix a{{1, 1}, {1, 1}};
  EXPECT_THROW(cholesky(a), NotPositiveDefinite);
  const Matrix l = cholesky_jittered(a);
  Matrix target = a;
  target(0, 0) += 1e-6;
  target(1, 1) += 1e-6;
  EXPECT_LT(reconstruction_error(l, target), 1e-6);
}

TEST(CholeskyJittered, ZeroMatrixGivesZeroFactor) {
  EXPECT_EQ(cholesky_jittered(Matrix(3, 3)), Matrix(3, 3));
}

TEST(CholeskyJittered, FailsWhenEscalationIsExhausted) {
  // Strongly indefinite: eigenvalues 3 and -1, trace/d = 1.
  EXPECT_THROW(cholesky_jittered(Matrix{{1, 2}, {2, 1}}), NotPositiveDefinite);
}

TEST(SampleMvn, ZeroCovarianceRepeatsMean) {
  Rng rng(1);
  const auto xs = sample_mvn(Vector{5, -3}, Matrix(2, 2), 4, rng);
  ASSERT_EQ(xs.size(), 4u);
  for (const auto& x : xs) EXPECT_EQ(x, (Vector{5, -3}));
}

TEST(SampleMvn, StandardNormalMoments) {
  Rng rng(2024);
  const std::size_t n = 100000;
  const auto xs = sample_mvn(Vector(2), Matrix::identity(2), n, rng);
  std::vector<std::vector<double>> raw;
  for (const auto& x : xs) raw.push_back(testing::to_std(x));
  const auto m = testing::naive_mean(raw);
  const auto c = testing::naive_cov(raw);
  for (double v : m) EXPECT_NEAR(v, 0.0, 0.02);
  EXPECT_NEAR(c[0][0], 1.0, 0.05);
  EXPECT_NEAR(c[1][1], 1.0, 0.05);
  EXPECT_NEAR(c[0][1], 0.0, 0.05);
}

TEST(SampleMvn, ScaledVariances) {
  Rng rng(99);
  const Matrix l = cholesky(Matrix{{4, 0}, {0, 1}});
  const auto xs = sample_mvn(Vector(2), l, 100000, rng);
  std::vector<std::vector<double>> raw;
  for (const auto& x : xs) raw.push_back(testing::to_std(x));
  const auto c = testing::naive_cov(raw);
  EXPECT_NEAR(c[0][0], 4.0, 0.1);
  EXPECT_NEAR(c[1][1], 1.0, 0.1);
}

TEST(SampleMvn, DeterministicPerSeed) {
  Rng rng(3);
  const Matrix l = cholesky(testing::random_spd(4, rng));
  const Vector mean{1, 2, 3, 4};
  Rng a(77), b(77);
  EXPECT_EQ(sample_mvn(mean, l, 50, a), sample_mvn(mean, l, 50, b));
}

TEST(SampleMvn, AffineInStandardSamples) {
  Rng setup(8);
  const std::size_t d = 6;
  const Matrix l = cholesky(testing::random_spd(d, setup));
  Vector mean(d);
  for (double& v : mean) v = gaussian_scalar(setup);

  Rng a(123), b(123);
  const auto direct = sample_mvn(mean, l, 200, a);
  const auto standard = sample_mvn(Vector(d), Matrix::identity(d), 200, b);
  for (std::size_t s = 0; s < direct.size(); ++s) {
    const Vector mapped = matvec(l, standard[s].span());
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(direct[s][i], mean[i] + mapped[i], 1e-12);
  }
}

TEST(SampleMvn, RejectsDimensionMismatch) {
  Rng rng(0);
  EXPECT_THROW(sample_mvn(Vector(3), Matrix::identity(2), 1, rng), DimensionMismatch);
}

TEST(GaussianScalar, SameSeedSameDraws) {
  Rng a(42), b(42);
  EXPECT_EQ(gaussian_scalar(a), gaussian_scalar(b));
  EXPECT_EQ(gaussian_scalar(a), gaussian_scalar(b));
}

TEST(GaussianScalar, DistributionMatchesStandardNormal) {
  Rng rng(31337);
  const std::size_t n = 100000;
  std::vector<double> draws(n);
  double sum = 0.0;
  for (double& v : draws) {
    v = gaussian_scalar(rng);
    sum += v;
  }
  const double mean = sum / n;
  double var = 0.0;
  for (double v : draws) var += (v - mean) * (v - mean);
  var /= n - 1;
  EXPECT_NEAR(mean, 0.0, 0.013);
  EXPECT_NEAR(var, 1.0, 0.02);
  EXPECT_LT(testing::ks_statistic_normal(draws), 0.01);
}

TEST(Rng, SplitStreamsAreIndependentOfParentPosition) {
  Rng parent(9);
  const Rng child_before = parent.split(4);
  parent.next_u64();
  EXPECT_EQ(parent.split(4).seed(), child_before.seed());
  EXPECT_NE(parent.split(4).seed(), parent.split(5).seed());
}

TEST(Rng, UniformIndexStaysInRange) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.uniform_index(7), 7u);
}

}  // namespace
}  // namespace slca
