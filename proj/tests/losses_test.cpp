#include <gtest/gtest.h>

#include <cmath>

#include "slca/errors.hpp"
#include "slca/losses.hpp"
#include "support/oracles.hpp"

namespace slca {
namespace {

// ln(1 + e^-10), evaluated at 30 digits.
constexpr double kLog1pExpMinus10 = 4.5398899216864646769e-05;

Vector random_logits(std::size_t n, Rng& rng, double scale = 3.0) {
  Vector v(n);
  for (double& x : v) x = scale * gaussian_scalar(rng);
  return v;
}

TEST(SoftmaxCe, UniformLogitsGiveLogC) {
  EXPECT_NEAR(softmax_ce(Vector{0, 0}.span(), 0).loss, std::log(2.0), 1e-15);
}

TEST(SoftmaxCe, ConfidentCorrectPrediction) {
  EXPECT_NEAR(softmax_ce(Vector{10, 0}.span(), 0).loss, kLog1pExpMinus10, 1e-15);
}

TEST(SoftmaxCe, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(9);
    const Vector h = random_logits(n, rng);
    const std::size_t y = rng.uniform_index(n);
    const auto numeric = testing::central_difference(
        [&](const std::vector<double>& x) { return softmax_ce(x, y).loss; }, testing::to_std(h));
    EXPECT_LT(testing::max_abs_diff(testing::to_std(softmax_ce(h.span(), y).grad), numeric), 1e-6);
  }
}

TEST(SoftmaxCe, GradientSumsToZero) {
  Rng rng(12);
  const Vector h = random_logits(6, rng);
  double s = 0.0;
  for (double g : softmax_ce(h.span(), 2).grad) s += g;
  EXPECT_NEAR(s, 0.0, 1e-14);
}

TEST(SoftmaxCe, LabelOutOfRangeThrows) {
  EXPECT_THROW(softmax_ce(Vector{1, 2}.span(), 2), InvalidArgument);
}

TEST(LogitNormCe, EqualLogitsGiveLogThree) {
  for (double c : {-4.0, 0.5, 7.0}) {
    for (double tau : {0.05, 0.1, 1.0}) {
      EXPECT_NEAR(logitnorm_ce(Vector{c, c, c}.span(), 1, tau).loss, std::log(3.0), 1e-12);
    }
  }
}

TEST(LogitNormCe, UnitNormLogits) {
  // ||H|| = 1, so z = H / 0.1 = [10, 0].
  EXPECT_NEAR(logitnorm_ce(Vector{1, 0}.span(), 0, 0.1).loss, kLog1pExpMinus10, 1e-15);
}

TEST(LogitNormCe, PositiveScalingLeavesLossUnchanged) {
  const double small = logitnorm_ce(Vector{3, 0}.span(), 0, 0.1).loss;
  const double large = logitnorm_ce(Vector{300, 0}.span(), 0, 0.1).loss;
  EXPECT_NEAR(small, large, 1e-12);
  EXPECT_NEAR(small, kLog1pExpMinus10, 1e-15);
}

TEST(LogitNormCe, ZeroLogitsUseNormFloor) {
  const LossValue v = logitnorm_ce(Vector(4).span(), 3, 0.1);
  EXPECT_NEAR(v.loss, std::log(4.0), 1e-15);
  for (double g : v.grad) EXPECT_TRUE(std::isfinite(g));
}

TEST(LogitNormCe, GradientIncludesNormDependence) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(49);
    const Vector h = random_logits(n, rng);
    const std::size_t y = rng.uniform_index(n);
    const double tau = 0.05 + rng.uniform();
    const auto numeric = testing::central_difference(
        [&](const std::vector<double>& x) { return logitnorm_ce(x, y, tau).loss; },
        testing::to_std(h));
    const auto analytic = testing::to_std(logitnorm_ce(h.span(), y, tau).grad);
    EXPECT_LT(testing::relative_error(analytic, numeric), 1e-4) << "trial " << trial;
  }
}

TEST(LogitNormCe, GradientIsOrthogonalToLogits) {
  // Scale invariance implies d/dk L(k H) = grad . H = 0.
  Rng rng(3);
  const Vector h = random_logits(7, rng);
  const LossValue v = logitnorm_ce(h.span(), 4, 0.1);
  EXPECT_NEAR(dot(v.grad.span(), h.span()), 0.0, 1e-12);
}

TEST(LogitNormCe, RejectsNonPositiveTau) {
  EXPECT_THROW(logitnorm_ce(Vector{1, 2}.span(), 0, 0.0), InvalidArgument);
}

TEST(LogitNormCe, ConfidenceDoesNotIncreaseWithTau) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector h = random_logits(5, rng);
    const std::size_t top = argmax_class(h.span());
    double previous = 1.0;
    for (double tau : {0.01, 0.05, 0.1, 0.5, 1.0, 5.0}) {
      Vector z(h.size());
      const double s = tau * norm(h.span());
      for (std::size_t i = 0; i < h.size(); ++i) z[i] = h[i] / s;
      const double p = softmax(z.span())[top];
      EXPECT_LE(p, previous + 1e-15);
      previous = p;
    }
  }
}

TEST(ArgmaxClass, PicksLargest) { EXPECT_EQ(argmax_class(Vector{0.1, 0.9, 0.3}.span()), 1u); }

TEST(ArgmaxClass, TiesGoToLowestIndex) { EXPECT_EQ(argmax_class(Vector{2, 2}.span()), 0u); }

TEST(ArgmaxClass, UnchangedByLogitNormalization) {
  Rng rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector h = random_logits(1 + rng.uniform_index(20), rng);
    Vector z(h.size());
    const double s = 0.1 * norm(h.span());
    for (std::size_t i = 0; i < h.size(); ++i) z[i] = h[i] / s;
    EXPECT_EQ(argmax_class(h.span()), argmax_class(z.span()));
  }
}

}  // namespace
}  // namespace slca
