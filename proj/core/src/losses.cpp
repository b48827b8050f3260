#include "slca/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slca/errors.hpp"

namespace slca {

namespace {

void check_inputs(std::span<const double> logits, std::size_t label) {
  if (logits.empty()) throw InvalidArgument("loss: empty logits");
  if (label >= logits.size()) {
    throw InvalidArgument("loss: label " + std::to_string(label) + " out of range for " +
                          std::to_string(logits.size()) + " logits");
  }
  if (!all_finite(logits)) throw Degenerate("loss: non-finite logits");
}

}  // namespace

Vector softmax(std::span<const double> logits) {
  Vector p(logits.size());
  if (logits.empty()) return p;
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

LossValue softmax_ce(std::span<const double> logits, std::size_t label) {
  check_inputs(logits, label);
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - m);
  LossValue out;
  out.loss = std::log(sum) - (logits[label] - m);
  out.grad = Vector(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out.grad[i] = std::exp(logits[i] - m) / sum;
  out.grad[label] -= 1.0;
  return out;
}

LossValue logitnorm_ce(std::span<const double> logits, std::size_t label, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("logitnorm_ce: tau must be positive");
  check_inputs(logits, label);
  const double raw_norm = norm(logits);
  const bool floored = raw_norm < kLogitNormFloor;
  const double h_norm = floored ? kLogitNormFloor : raw_norm;
  const double scale = tau * h_norm;

  Vector z(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) z[i] = logits[i] / scale;
  LossValue inner = softmax_ce(z.span(), label);

  // z = H / (tau ||H||):
  //   dL/dH_j = g_j / s - (g . H) * H_j / (s * ||H||^2)
  // where g = dL/dz and s = tau ||H||. Below the floor the norm is constant.
  LossValue out;
  out.loss = inner.loss;
  out.grad = Vector(logits.size());
  const double g_dot_h = dot(inner.grad.span(), logits);
  for (std::size_t j = 0; j < logits.size(); ++j) {
    double g = inner.grad[j] / scale;
    if (!floored) g -= g_dot_h * logits[j] / (scale * h_norm * h_norm);
    out.grad[j] = g;
  }
  return out;
}

LossValue compute_loss(const LossSpec& spec, std::span<const double> logits, std::size_t label) {
  return spec.kind == LossKind::logit_norm ? logitnorm_ce(logits, label, spec.tau)
                                           : softmax_ce(logits, label);
}

std::size_t argmax_class(std::span<const double> logits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

}  // namespace slca
