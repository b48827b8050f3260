#include <gtest/gtest.h>

#include "slca/analysis.hpp"
#include "slca/errors.hpp"
#include "support/oracles.hpp"

namespace slca {
namespace {

FeatureSnapshot snap(Matrix m) { return {std::move(m), "snap"}; }

Matrix scaled(Matrix m, double k) {
  for (double& v : m.flat()) v *= k;
  return m;
}

LabeledFeatures gaussian_blobs(std::size_t classes, std::size_t per_class, double sep,
                               std::size_t d, Rng& rng, std::uint64_t means_seed) {
  Rng means(means_seed);
  std::vector<Vector> centers;
  for (std::size_t c = 0; c < classes; ++c) {
    Vector m(d);
    for (double& v : m) v = sep * gaussian_scalar(means);
    centers.push_back(m);
  }
  LabeledFeatures out;
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      Vector x(d);
      for (std::size_t k = 0; k < d; ++k) x[k] = centers[c][k] + gaussian_scalar(rng);
      out.features.push_back(x);
      out.labels.push_back(static_cast<ClassId>(c));
    }
  return out;
}

TEST(Cka, SelfSimilarityIsOne) {
  Rng rng(1);
  const Matrix x = testing::random_matrix(50, 6, rng);
  EXPECT_NEAR(cka(snap(x), snap(x)), 1.0, 1e-12);
}

TEST(Cka, InvariantToOrthogonalTransform) {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = testing::random_matrix(100, 8, rng);
    const Matrix q = testing::random_orthogonal(8, rng);
    EXPECT_NEAR(cka(snap(x), snap(matmul(x, q))), 1.0, 1e-9);
  }
}

TEST(Cka, InvariantToIsotropicScaling) {
  Rng rng(3);
  const Matrix x = testing::random_matrix(40, 5, rng);
  const Matrix y = testing::random_matrix(40, 7, rng);
  EXPECT_NEAR(cka(snap(x), snap(y)), cka(snap(scaled(x, 17.0)), snap(scaled(y, 0.01))), 1e-12);
}

TEST(Cka, SymmetricInArguments) {
  Rng rng(4);
  const Matrix x = testing::random_matrix(60, 4, rng);
  const Matrix y = testing::random_matrix(60, 9, rng);
  EXPECT_NEAR(cka(snap(x), snap(y)), cka(snap(y), snap(x)), 1e-12);
}

TEST(Cka, IndependentFeaturesScoreLow) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const Matrix x = testing::random_matrix(1000, 10, rng);
    const Matrix y = testing::random_matrix(1000, 10, rng);
    EXPECT_LT(cka(snap(x), snap(y)), 0.1) << "seed " << seed;
  }
}

TEST(Cka, AgreesWithGramFormulation) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 10 + rng.uniform_index(40);
    Matrix x = testing::random_matrix(n, 3 + rng.uniform_index(5), rng);
    Matrix y = testing::random_matrix(n, 2 + rng.uniform_index(6), rng);
    for (std::size_t i = 0; i < n; ++i) y(i, 0) += 2.0 * x(i, 0) + 5.0;
    EXPECT_NEAR(cka(snap(x), snap(y)), testing::gram_cka(x, y), 1e-10);
  }
}

TEST(Cka, ErrorPaths) {
  Rng rng(6);
  const Matrix x = testing::random_matrix(10, 3, rng);
  EXPECT_THROW(cka(snap(x), snap(testing::random_matrix(11, 3, rng))), DimensionMismatch);
  EXPECT_THROW(cka(snap(x), snap(Matrix(10, 3, 2.5))), Degenerate);
}

TEST(LinearProbe, SeparableFeaturesAreNearPerfect) {
  Rng rng(10);
  const LabeledFeatures train = gaussian_blobs(5, 100, 10.0, 8, rng, 77);
  const LabeledFeatures test = gaussian_blobs(5, 50, 10.0, 8, rng, 77);
  EXPECT_GE(linear_probe(train, test, ProbeConfig{}), 0.99);
}

TEST(LinearProbe, ShuffledLabelsGiveChance) {
  Rng rng(11);
  LabeledFeatures train = gaussian_blobs(4, 250, 0.0, 8, rng, 1);
  LabeledFeatures test = gaussian_blobs(4, 500, 0.0, 8, rng, 1);
  EXPECT_NEAR(linear_probe(train, test, ProbeConfig{}), 0.25, 0.05);
}

TEST(LinearProbe, DeterministicPerSeed) {
  Rng rng(12);
  const LabeledFeatures train = gaussian_blobs(3, 40, 2.0, 4, rng, 3);
  const LabeledFeatures test = gaussian_blobs(3, 40, 2.0, 4, rng, 3);
  ProbeConfig config;
  config.seed = 5;
  EXPECT_EQ(linear_probe(train, test, config), linear_probe(train, test, config));
}

TEST(LinearProbe, NeedsTwoClasses) {
  LabeledFeatures one{{Vector{1, 2}, Vector{3, 4}}, {0, 0}};
  EXPECT_THROW(linear_probe(one, one, ProbeConfig{}), InvalidArgument);
  LabeledFeatures ragged{{Vector{1, 2}}, {0, 1}};
  EXPECT_THROW(linear_probe(ragged, ragged, ProbeConfig{}), InvalidArgument);
}

}  // namespace
}  // namespace slca
