#include "slca/alignment.hpp"

#include <vector>

#include "slca/errors.hpp"
#include "slca/optimizer.hpp"
#include "slca/parallel.hpp"
#include "training.hpp"

namespace slca {

void AlignConfig::validate() const {
  if (samples_per_class == 0) throw InvalidArgument("align: samples_per_class must be >= 1");
  if (!(tau > 0.0)) throw InvalidArgument("align: tau must be positive");
  if (!(lr > 0.0)) throw InvalidArgument("align: lr must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidArgument("align: momentum in [0, 1)");
  if (batch_size == 0) throw InvalidArgument("align: batch_size must be positive");
}

Classifier align_classifier(const Classifier& classifier, const StatsBank& bank,
                            const AlignConfig& config, Rng& rng) {
  config.validate();
  if (bank.feature_dim() != classifier.feature_dim()) {
    throw DimensionMismatch("align: stats bank dimension differs from classifier");
  }
  const ClassSet& classes = classifier.classes();
  for (ClassId id : classes) {
    if (!bank.contains(id)) {
      throw InvalidArgument("align: missing statistics for class " + std::to_string(id));
    }
  }

  // Per-class child streams keep sampling reproducible under parallelism.
  const Rng sample_root = rng.split(0);
  std::vector<std::vector<Vector>> per_class(classes.size());
  parallel_for(classes.size(), [&](std::size_t k) {
    Rng class_rng = sample_root.split(classes[k]);
    per_class[k] = sample_class_features(bank.at(classes[k]), config.samples_per_class, class_rng);
  });

  detail::LabeledSet pool;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    for (auto& f : per_class[k]) {
      pool.features.push_back(std::move(f));
      pool.labels.push_back(classes[k]);
    }
  }

  Classifier aligned = classifier;
  const LossSpec loss =
      config.logit_norm ? LossSpec::logit_norm(config.tau) : LossSpec::cross_entropy();
  Rng shuffle_rng = rng.split(1);
  detail::train_classifier(
      aligned, pool, classes, loss,
      detail::classifier_sgd(config.lr, config.momentum, config.batch_size, config.epochs),
      shuffle_rng);
  return aligned;
}

}  // namespace slca
