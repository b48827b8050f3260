#pragma once

#include <cstddef>

#include "slca/model.hpp"
#include "slca/rng.hpp"
#include "slca/stats.hpp"

namespace slca {

struct AlignConfig {
  std::size_t samples_per_class = kDefaultSamplesPerClass;
  double tau = 0.1;
  std::size_t epochs = 5;
  std::size_t batch_size = 128;
  double lr = 0.01;
  double momentum = 0.9;
  bool logit_norm = true;

  void validate() const;
};

/// Post-hoc classifier alignment.
///
/// Draws samples_per_class features from every active class's Gaussian in
/// the bank (once per call), then trains a copy of the classifier on the
/// pooled set with logit-normalized cross-entropy (or plain cross-entropy
/// when logit_norm is off) over all active classes. Training starts from the
/// given weights. The input classifier is not modified and no representation
/// parameters are involved.
///
/// Throws InvalidArgument when the bank lacks a class or has a different
/// feature dimension; NotPositiveDefinite propagates from sampling.
Classifier align_classifier(const Classifier& classifier, const StatsBank& bank,
                            const AlignConfig& config, Rng& rng);

}  // namespace slca
