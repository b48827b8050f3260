#include "slca/analysis.hpp"

#include <algorithm>
#include <string>

#include "slca/errors.hpp"
#include "slca/model.hpp"
#include "slca/rng.hpp"
#include "training.hpp"

namespace slca {

namespace {

Matrix column_centered(const Matrix& m) {
  Matrix c = m;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, j);
    mean /= static_cast<double>(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) c(i, j) -= mean;
  }
  return c;
}

/// a^T b without materializing the transpose.
Matrix cross_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.cols(), b.cols());
  for (std::size_t n = 0; n < a.rows(); ++n) {
    const auto ar = a.row(n);
    const auto br = b.row(n);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ai = ar[i];
      auto out_row = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += ai * br[j];
    }
  }
  return out;
}

}  // namespace

double cka(const FeatureSnapshot& x, const FeatureSnapshot& y) {
  if (x.features.rows() != y.features.rows()) {
    throw DimensionMismatch("cka: snapshots have " + std::to_string(x.features.rows()) + " and " +
                            std::to_string(y.features.rows()) + " rows");
  }
  if (x.features.rows() < 2) throw InvalidArgument("cka: need at least two probe rows");
  const Matrix xc = column_centered(x.features);
  const Matrix yc = column_centered(y.features);
  const double xx = frobenius_norm(cross_product(xc, xc));
  const double yy = frobenius_norm(cross_product(yc, yc));
  if (!(xx > 0.0) || !(yy > 0.0)) {
    throw Degenerate("cka: snapshot '" + (xx > 0.0 ? y.tag : x.tag) + "' has zero variance");
  }
  const double yx = frobenius_norm(cross_product(yc, xc));
  // Divide before squaring to stay in range for large feature magnitudes.
  return (yx / xx) * (yx / yy);
}

double linear_probe(const LabeledFeatures& train, const LabeledFeatures& test,
                    const ProbeConfig& config) {
  if (train.features.size() != train.labels.size() || test.features.size() != test.labels.size()) {
    throw InvalidArgument("linear_probe: features and labels differ in length");
  }
  if (train.features.empty() || test.features.empty()) {
    throw InvalidArgument("linear_probe: empty train or test set");
  }
  ClassSet classes(train.labels);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw InvalidArgument("linear_probe: need at least two classes");

  const std::size_t d = train.features.front().size();
  Rng rng(config.seed);
  Rng init_rng = rng.split(0);
  Classifier probe(d);
  probe.extend(classes, init_rng);

  detail::LabeledSet data{train.features, train.labels};
  Rng shuffle_rng = rng.split(1);
  detail::train_classifier(
      probe, data, classes, LossSpec::cross_entropy(),
      detail::classifier_sgd(config.lr, config.momentum, config.batch_size, config.epochs),
      shuffle_rng);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.features.size(); ++i) {
    if (probe.predict(test.features[i].span()) == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.features.size());
}

}  // namespace slca
