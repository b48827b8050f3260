#pragma once

#include <cstddef>
#include <vector>

#include "slca/linalg.hpp"
#include "slca/losses.hpp"
#include "slca/model.hpp"
#include "slca/optimizer.hpp"
#include "slca/rng.hpp"
#include "slca/types.hpp"

namespace slca::detail {

struct LabeledSet {
  std::vector<Vector> features;
  std::vector<ClassId> labels;

  std::size_t size() const noexcept { return labels.size(); }
};

/// Fisher-Yates permutation of [0, n) driven by rng.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

/// Mini-batch SGD on a classifier alone (feature space), loss restricted to
/// `mask`. Uses lr_cls, momentum, weight_decay, batch_size and
/// epochs_per_task from `optimizer`. Batches are reshuffled every epoch.
void train_classifier(Classifier& classifier, const LabeledSet& data, const ClassSet& mask,
                      const LossSpec& loss, const OptimizerConfig& optimizer, Rng& rng);

/// OptimizerConfig for classifier-only training at a single rate.
OptimizerConfig classifier_sgd(double lr, double momentum, std::size_t batch_size,
                               std::size_t epochs);

}  // namespace slca::detail
