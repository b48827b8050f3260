#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace slca {

/// Two-rate SGD settings. The representation group uses lr_rep, the
/// classifier group lr_cls; a Slow Learner run requires lr_rep < lr_cls.
struct OptimizerConfig {
  double lr_rep = 0.0001;
  double lr_cls = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::size_t batch_size = 128;
  std::size_t epochs_per_task = 20;

  /// Throws InvalidArgument on non-positive rates or sizes.
  void validate() const;
  bool slow_learner_contract() const noexcept { return lr_rep < lr_cls; }
};

/// Same learning rate for every parameter group (the sequential fine-tuning
/// baseline).
OptimizerConfig uniform_lr_config(double lr);

struct ParamTensor {
  std::string name;
  std::span<double> value;
};

struct GradTensor {
  std::string name;
  std::span<const double> value;
};

/// Trainable parameters split by learning-rate group. The two groups must not
/// share tensors.
struct ParamGroups {
  std::vector<ParamTensor> rep;
  std::vector<ParamTensor> cls;
};

/// Gradients laid out exactly like the ParamGroups they update.
struct GradGroups {
  std::vector<GradTensor> rep;
  std::vector<GradTensor> cls;
};

/// SGD with heavy-ball momentum, v <- momentum * v + g + wd * w, w <- w - lr * v.
/// Velocity buffers are keyed by parameter name and persist across steps.
class Sgd {
 public:
  explicit Sgd(OptimizerConfig config);

  /// Throws DimensionMismatch when names or sizes of params and grads differ.
  void step(ParamGroups& params, const GradGroups& grads);

  const OptimizerConfig& config() const noexcept { return config_; }
  /// Momentum buffer for a parameter, or nullptr before its first update.
  const std::vector<double>* velocity(const std::string& name) const;

 private:
  void update_group(std::vector<ParamTensor>& params, const std::vector<GradTensor>& grads,
                    double lr);

  OptimizerConfig config_;
  std::map<std::string, std::vector<double>> velocity_;
};

/// One update of every group with its own learning rate.
void sgd_step(ParamGroups& params, const GradGroups& grads, Sgd& optimizer);

}  // namespace slca
