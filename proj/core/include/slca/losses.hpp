#pragma once

#include <cstddef>
#include <span>

#include "slca/linalg.hpp"

namespace slca {

/// Pre-softmax outputs over a class set, ordered by class index.
using Logits = Vector;

struct LossValue {
  double loss = 0.0;
  /// d loss / d logits.
  Vector grad;
};

enum class LossKind { cross_entropy, logit_norm };

struct LossSpec {
  LossKind kind = LossKind::cross_entropy;
  double tau = 0.1;

  static LossSpec cross_entropy() { return {LossKind::cross_entropy, 0.1}; }
  static LossSpec logit_norm(double tau = 0.1) { return {LossKind::logit_norm, tau}; }
};

/// Norm floor used by logitnorm_ce so that all-zero logits give ln C.
inline constexpr double kLogitNormFloor = 1e-12;

Vector softmax(std::span<const double> logits);

/// -log softmax(logits)[label] and its gradient softmax - onehot.
LossValue softmax_ce(std::span<const double> logits, std::size_t label);

/// Cross-entropy on logits / (tau * ||logits||). The gradient includes the
/// dependence of the norm on every logit.
LossValue logitnorm_ce(std::span<const double> logits, std::size_t label, double tau);

LossValue compute_loss(const LossSpec& spec, std::span<const double> logits, std::size_t label);

/// Index of the largest logit; ties go to the lowest index.
std::size_t argmax_class(std::span<const double> logits);

}  // namespace slca
