#include "slca/optimizer.hpp"

#include <string>

#include "slca/errors.hpp"

namespace slca {

void OptimizerConfig::validate() const {
  if (!(lr_rep > 0.0)) throw InvalidArgument("optimizer: lr_rep must be positive");
  if (!(lr_cls > 0.0)) throw InvalidArgument("optimizer: lr_cls must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw InvalidArgument("optimizer: momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw InvalidArgument("optimizer: weight_decay must be >= 0");
  if (batch_size == 0) throw InvalidArgument("optimizer: batch_size must be positive");
  if (epochs_per_task == 0) throw InvalidArgument("optimizer: epochs_per_task must be positive");
}

OptimizerConfig uniform_lr_config(double lr) {
  if (!(lr > 0.0)) throw InvalidArgument("uniform_lr_config: learning rate must be positive");
  OptimizerConfig config;
  config.lr_rep = lr;
  config.lr_cls = lr;
  return config;
}

Sgd::Sgd(OptimizerConfig config) : config_(config) { config_.validate(); }

const std::vector<double>* Sgd::velocity(const std::string& name) const {
  auto it = velocity_.find(name);
  return it == velocity_.end() ? nullptr : &it->second;
}

void Sgd::step(ParamGroups& params, const GradGroups& grads) {
  if (params.rep.size() != grads.rep.size() || params.cls.size() != grads.cls.size()) {
    throw DimensionMismatch("sgd: parameter and gradient groups differ in length");
  }
  update_group(params.rep, grads.rep, config_.lr_rep);
  update_group(params.cls, grads.cls, config_.lr_cls);
}

void Sgd::update_group(std::vector<ParamTensor>& params, const std::vector<GradTensor>& grads,
                       double lr) {
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& p = params[t];
    const auto& g = grads[t];
    if (p.name != g.name || p.value.size() != g.value.size()) {
      throw DimensionMismatch("sgd: gradient '" + g.name + "' does not match parameter '" +
                              p.name + "'");
    }
    if (config_.momentum == 0.0) {
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        p.value[i] -= lr * (g.value[i] + config_.weight_decay * p.value[i]);
      }
      continue;
    }
    auto& v = velocity_[p.name];
    if (v.size() != p.value.size()) v.assign(p.value.size(), 0.0);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      v[i] = config_.momentum * v[i] + g.value[i] + config_.weight_decay * p.value[i];
      p.value[i] -= lr * v[i];
    }
  }
}

void sgd_step(ParamGroups& params, const GradGroups& grads, Sgd& optimizer) {
  optimizer.step(params, grads);
}

}  // namespace slca
