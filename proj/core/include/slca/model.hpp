#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "slca/linalg.hpp"
#include "slca/losses.hpp"
#include "slca/optimizer.hpp"
#include "slca/rng.hpp"
#include "slca/types.hpp"

namespace slca {

enum class HeadKind { identity, mlp };

/// MLP initialization. `identity` builds a network that computes exactly
/// f(x) = x at start (first layer [I; -I], last layer [I, -I], middle layers
/// pass-through, remaining units He-normal with zero outgoing weight), so
/// training starts from a representation that is already informative.
enum class HeadInit { random, identity };

struct HeadConfig {
  HeadKind kind = HeadKind::identity;
  HeadInit init = HeadInit::random;
  std::size_t input_dim = 0;
  /// Ignored for the identity head, which has output_dim == input_dim.
  std::size_t output_dim = 0;
  std::size_t hidden_dim = 64;
  std::size_t layers = 2;
};

struct HeadGradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// The representation map f. Either the identity (frozen external features)
/// or a fully connected network with rectifier activations between layers
/// and a linear output layer.
class RepresentationHead {
 public:
  /// Per-sample cache for backward.
  struct Trace {
    std::vector<Vector> inputs;  // input to each layer
    std::vector<Vector> pre;     // pre-activation of each layer
  };

  RepresentationHead() = default;

  static RepresentationHead identity(std::size_t dim);
  /// He-normal weights, zero biases.
  static RepresentationHead mlp(std::size_t input_dim, std::size_t hidden_dim,
                                std::size_t output_dim, std::size_t layers, Rng& rng);
  /// Identity-preserving init; needs layers >= 2, hidden_dim >= 2 * input_dim
  /// and output_dim == input_dim.
  static RepresentationHead mlp_identity(std::size_t input_dim, std::size_t hidden_dim,
                                         std::size_t layers, Rng& rng);
  static RepresentationHead mlp(std::vector<Matrix> weights, std::vector<Vector> biases);
  static RepresentationHead from_config(const HeadConfig& config, Rng& rng);

  HeadKind kind() const noexcept { return kind_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  std::size_t num_layers() const noexcept { return weights_.size(); }
  std::size_t parameter_count() const noexcept;

  Vector forward(std::span<const double> x) const;
  Vector forward(std::span<const double> x, Trace& trace) const;

  /// Adds scale * d loss / d params to acc given d loss / d output.
  void backward(const Trace& trace, std::span<const double> grad_out, HeadGradients& acc,
                double scale) const;

  std::vector<Matrix>& weights() noexcept { return weights_; }
  const std::vector<Matrix>& weights() const noexcept { return weights_; }
  std::vector<Vector>& biases() noexcept { return biases_; }
  const std::vector<Vector>& biases() const noexcept { return biases_; }

  HeadGradients zero_gradients() const;

  friend bool operator==(const RepresentationHead&, const RepresentationHead&) = default;

 private:
  HeadKind kind_ = HeadKind::identity;
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
  std::vector<Matrix> weights_;  // [out x in] per layer
  std::vector<Vector> biases_;
};

/// Linear classifier with one row (weight + bias) per active class. Rows are
/// kept sorted by class id, so logits are ordered by class index.
class Classifier {
 public:
  Classifier() = default;
  explicit Classifier(std::size_t feature_dim) : feature_dim_(feature_dim), weight_(0, feature_dim) {}

  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t num_classes() const noexcept { return classes_.size(); }
  const ClassSet& classes() const noexcept { return classes_; }
  bool contains(ClassId id) const;
  /// Row index of a class; throws InvalidArgument when inactive.
  std::size_t row_of(ClassId id) const;

  /// Allocates rows drawn from N(0, init_std^2) with zero bias, in increasing
  /// class order. Existing rows are untouched. Throws on collisions.
  void extend(std::span<const ClassId> new_classes, Rng& rng, double init_std = 0.02);
  /// Adds one class with explicit parameters.
  void add_class(ClassId id, std::span<const double> weight, double bias);

  Logits logits(std::span<const double> features) const;
  ClassId predict(std::span<const double> features) const;

  Matrix& weight() noexcept { return weight_; }
  const Matrix& weight() const noexcept { return weight_; }
  Vector& bias() noexcept { return bias_; }
  const Vector& bias() const noexcept { return bias_; }

  friend bool operator==(const Classifier&, const Classifier&) = default;

 private:
  void insert_row(ClassId id, std::span<const double> weight, double bias);

  std::size_t feature_dim_ = 0;
  ClassSet classes_;
  Matrix weight_;
  Vector bias_;
};

/// M = classifier o head.
struct Model {
  RepresentationHead head;
  Classifier classifier;

  friend bool operator==(const Model&, const Model&) = default;
};

Model make_model(const HeadConfig& config, Rng& rng);

struct ForwardResult {
  Vector features;
  Logits logits;
};

ForwardResult forward(const Model& model, std::span<const double> x);

struct Gradients {
  double loss = 0.0;
  HeadGradients head;
  /// Same shape as the classifier; rows outside the mask stay zero.
  Matrix cls_weight;
  Vector cls_bias;
};

Gradients zero_gradients(const Model& model);

/// Loss restricted to the masked classes. Adds scale * gradients to acc and
/// returns the unscaled loss. The label must belong to the mask and the mask
/// must be a subset of the active classes.
double accumulate_backward(const Model& model, std::span<const double> x, ClassId label,
                           const ClassSet& mask, const LossSpec& loss, Gradients& acc,
                           double scale = 1.0);

Gradients backward(const Model& model, std::span<const double> x, ClassId label,
                   const ClassSet& mask, const LossSpec& loss);

/// Classifier-only variant on precomputed features. When grad_features is
/// non-empty it is overwritten with the unscaled d loss / d features.
double accumulate_classifier_backward(const Classifier& classifier,
                                      std::span<const double> features, ClassId label,
                                      const ClassSet& mask, const LossSpec& loss,
                                      Matrix& grad_weight, Vector& grad_bias, double scale,
                                      std::span<double> grad_features = {});

void extend_classifier(Model& model, std::span<const ClassId> new_classes, Rng& rng);

Classifier clone_classifier(const Model& model);

/// Views of the head parameters (when include_rep) and of the masked
/// classifier rows. Invalidated by extend_classifier.
ParamGroups param_groups(Model& model, const ClassSet& mask, bool include_rep = true);
ParamGroups param_groups(Classifier& classifier, const ClassSet& mask);
GradGroups grad_groups(const Gradients& grads, const Model& model, const ClassSet& mask,
                       bool include_rep = true);
GradGroups grad_groups(const Matrix& grad_weight, const Vector& grad_bias,
                       const Classifier& classifier, const ClassSet& mask);

/// Binary checkpoint ("SLCM", version 1, little-endian, 32-bit floats).
std::vector<std::uint8_t> encode_model(const Model& model);
Model decode_model(std::span<const std::uint8_t> bytes);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace slca
