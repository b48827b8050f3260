#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "slca/linalg.hpp"
#include "slca/types.hpp"

namespace slca {

/// Features of a fixed probe set under one representation state. Row i of
/// two snapshots being compared must come from the same probe input.
struct FeatureSnapshot {
  Matrix features;  // n x d
  std::string tag;
};

/// Linear centered kernel alignment:
///   ||Yc^T Xc||_F^2 / (||Xc^T Xc||_F * ||Yc^T Yc||_F)
/// with column-centered Xc, Yc. Computed in feature space, never forming
/// the n x n Gram matrices.
/// Throws DimensionMismatch if row counts differ and Degenerate if either
/// snapshot has no variance.
double cka(const FeatureSnapshot& x, const FeatureSnapshot& y);

struct LabeledFeatures {
  std::vector<Vector> features;
  std::vector<ClassId> labels;
};

struct ProbeConfig {
  std::size_t epochs = 50;
  double lr = 0.01;
  double momentum = 0.9;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
};

/// Trains a fresh linear classifier (softmax cross-entropy over every class
/// in `train`, no masking) on frozen features and returns test accuracy
/// over all classes. Throws InvalidArgument with fewer than two classes.
double linear_probe(const LabeledFeatures& train, const LabeledFeatures& test,
                    const ProbeConfig& config);

}  // namespace slca
