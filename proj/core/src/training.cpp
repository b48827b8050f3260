#include "training.hpp"

#include <algorithm>
#include <numeric>

#include "slca/optimizer.hpp"

namespace slca::detail {

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
  return idx;
}

OptimizerConfig classifier_sgd(double lr, double momentum, std::size_t batch_size,
                               std::size_t epochs) {
  OptimizerConfig config;
  config.lr_rep = lr;
  config.lr_cls = lr;
  config.momentum = momentum;
  config.batch_size = batch_size;
  config.epochs_per_task = epochs;
  return config;
}

void train_classifier(Classifier& classifier, const LabeledSet& data, const ClassSet& mask,
                      const LossSpec& loss, const OptimizerConfig& optimizer, Rng& rng) {
  if (data.size() == 0 || optimizer.epochs_per_task == 0) return;
  Sgd sgd(optimizer);
  const std::size_t batch_size = optimizer.batch_size;
  const std::size_t epochs = optimizer.epochs_per_task;

  ParamGroups params = param_groups(classifier, mask);
  Matrix grad_weight(classifier.num_classes(), classifier.feature_dim());
  Vector grad_bias(classifier.num_classes());
  const GradGroups grads = grad_groups(grad_weight, grad_bias, classifier, mask);

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const auto order = shuffled_indices(data.size(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop = std::min(order.size(), start + batch_size);
      const double scale = 1.0 / static_cast<double>(stop - start);
      std::fill(grad_weight.flat().begin(), grad_weight.flat().end(), 0.0);
      std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
      for (std::size_t i = start; i < stop; ++i) {
        const std::size_t k = order[i];
        accumulate_classifier_backward(classifier, data.features[k].span(), data.labels[k], mask,
                                       loss, grad_weight, grad_bias, scale);
      }
      sgd.step(params, grads);
    }
  }
}

}  // namespace slca::detail
