#include "slca/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "slca/errors.hpp"

namespace slca {

// ---------------------------------------------------------------------------
// RepresentationHead

RepresentationHead RepresentationHead::identity(std::size_t dim) {
  if (dim == 0) throw InvalidArgument("identity head: dimension must be positive");
  RepresentationHead h;
  h.kind_ = HeadKind::identity;
  h.input_dim_ = dim;
  h.output_dim_ = dim;
  return h;
}

RepresentationHead RepresentationHead::mlp(std::size_t input_dim, std::size_t hidden_dim,
                                           std::size_t output_dim, std::size_t layers,
                                           Rng& rng) {
  if (input_dim == 0 || output_dim == 0 || layers == 0 || (layers > 1 && hidden_dim == 0)) {
    throw InvalidArgument("mlp head: dimensions and layer count must be positive");
  }
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t out = l + 1 == layers ? output_dim : hidden_dim;
    Matrix w(out, in);
    const double stddev = std::sqrt(2.0 / static_cast<double>(in));
    for (double& v : w.flat()) v = stddev * gaussian_scalar(rng);
    weights.push_back(std::move(w));
    biases.emplace_back(out);
    in = out;
  }
  return mlp(std::move(weights), std::move(biases));
}

RepresentationHead RepresentationHead::mlp_identity(std::size_t input_dim, std::size_t hidden_dim,
                                                    std::size_t layers, Rng& rng) {
  if (input_dim == 0 || layers < 2 || hidden_dim < 2 * input_dim) {
    throw InvalidArgument("identity-initialized mlp needs >= 2 layers and hidden >= 2 * input");
  }
  RepresentationHead h = mlp(input_dim, hidden_dim, input_dim, layers, rng);
  const std::size_t d = input_dim;
  Matrix& first = h.weights_.front();
  for (std::size_t i = 0; i < 2 * d; ++i) std::fill(first.row(i).begin(), first.row(i).end(), 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    first(i, i) = 1.0;
    first(d + i, i) = -1.0;
  }
  for (std::size_t l = 1; l + 1 < layers; ++l) {
    Matrix& w = h.weights_[l];
    for (std::size_t i = 0; i < 2 * d; ++i) {
      std::fill(w.row(i).begin(), w.row(i).end(), 0.0);
      w(i, i) = 1.0;
    }
    for (std::size_t i = 2 * d; i < w.rows(); ++i)
      for (std::size_t j = 0; j < 2 * d; ++j) w(i, j) = 0.0;
  }
  Matrix& last = h.weights_.back();
  std::fill(last.flat().begin(), last.flat().end(), 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    last(i, i) = 1.0;
    last(i, d + i) = -1.0;
  }
  return h;
}

RepresentationHead RepresentationHead::mlp(std::vector<Matrix> weights,
                                           std::vector<Vector> biases) {
  if (weights.empty() || weights.size() != biases.size()) {
    throw InvalidArgument("mlp head: need one bias per weight matrix");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (biases[l].size() != weights[l].rows() || weights[l].rows() == 0 ||
        weights[l].cols() == 0) {
      throw DimensionMismatch("mlp head: bias/weight shape mismatch in layer " +
                              std::to_string(l));
    }
    if (l > 0 && weights[l].cols() != weights[l - 1].rows()) {
      throw DimensionMismatch("mlp head: layer " + std::to_string(l) +
                              " input does not match previous output");
    }
  }
  RepresentationHead h;
  h.kind_ = HeadKind::mlp;
  h.input_dim_ = weights.front().cols();
  h.output_dim_ = weights.back().rows();
  h.weights_ = std::move(weights);
  h.biases_ = std::move(biases);
  return h;
}

RepresentationHead RepresentationHead::from_config(const HeadConfig& config, Rng& rng) {
  if (config.kind == HeadKind::identity) {
    if (config.output_dim != 0 && config.output_dim != config.input_dim) {
      throw InvalidArgument("identity head requires output_dim == input_dim");
    }
    return identity(config.input_dim);
  }
  if (config.init == HeadInit::identity) {
    if (config.output_dim != 0 && config.output_dim != config.input_dim) {
      throw InvalidArgument("identity-initialized mlp requires output_dim == input_dim");
    }
    return mlp_identity(config.input_dim, config.hidden_dim, config.layers, rng);
  }
  return mlp(config.input_dim, config.hidden_dim, config.output_dim, config.layers, rng);
}

std::size_t RepresentationHead::parameter_count() const noexcept {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l)
    n += weights_[l].rows() * weights_[l].cols() + biases_[l].size();
  return n;
}

Vector RepresentationHead::forward(std::span<const double> x) const {
  Trace unused;
  return forward(x, unused);
}

Vector RepresentationHead::forward(std::span<const double> x, Trace& trace) const {
  if (x.size() != input_dim_) {
    throw DimensionMismatch("head: input has dimension " + std::to_string(x.size()) +
                            ", expected " + std::to_string(input_dim_));
  }
  trace.inputs.clear();
  trace.pre.clear();
  Vector cur(x);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Vector pre = matvec(weights_[l], cur.span());
    for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += biases_[l][i];
    trace.inputs.push_back(std::move(cur));
    cur = pre;
    if (l + 1 < weights_.size()) {
      for (double& v : cur) v = v > 0.0 ? v : 0.0;
    }
    trace.pre.push_back(std::move(pre));
  }
  return cur;
}

void RepresentationHead::backward(const Trace& trace, std::span<const double> grad_out,
                                  HeadGradients& acc, double scale) const {
  if (weights_.empty()) return;
  Vector delta(grad_out);
  for (std::size_t l = weights_.size(); l-- > 0;) {
    const Matrix& w = weights_[l];
    if (l + 1 < weights_.size()) {
      for (std::size_t i = 0; i < delta.size(); ++i) {
        if (!(trace.pre[l][i] > 0.0)) delta[i] = 0.0;
      }
    }
    const Vector& input = trace.inputs[l];
    Matrix& gw = acc.weights[l];
    Vector& gb = acc.biases[l];
    for (std::size_t r = 0; r < w.rows(); ++r) {
      const double dr = scale * delta[r];
      if (dr == 0.0) continue;
      auto g_row = gw.row(r);
      for (std::size_t c = 0; c < w.cols(); ++c) g_row[c] += dr * input[c];
      gb[r] += dr;
    }
    if (l == 0) break;
    Vector next(w.cols());
    for (std::size_t r = 0; r < w.rows(); ++r) {
      const double dr = delta[r];
      if (dr == 0.0) continue;
      const auto w_row = w.row(r);
      for (std::size_t c = 0; c < w.cols(); ++c) next[c] += dr * w_row[c];
    }
    delta = std::move(next);
  }
}

HeadGradients RepresentationHead::zero_gradients() const {
  HeadGradients g;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    g.weights.emplace_back(weights_[l].rows(), weights_[l].cols());
    g.biases.emplace_back(biases_[l].size());
  }
  return g;
}

// ---------------------------------------------------------------------------
// Classifier

bool Classifier::contains(ClassId id) const {
  return std::binary_search(classes_.begin(), classes_.end(), id);
}

std::size_t Classifier::row_of(ClassId id) const {
  auto it = std::lower_bound(classes_.begin(), classes_.end(), id);
  if (it == classes_.end() || *it != id) {
    throw InvalidArgument("classifier: class " + std::to_string(id) + " is not active");
  }
  return static_cast<std::size_t>(it - classes_.begin());
}

void Classifier::insert_row(ClassId id, std::span<const double> weight, double bias) {
  auto it = std::lower_bound(classes_.begin(), classes_.end(), id);
  const auto row = static_cast<std::size_t>(it - classes_.begin());
  classes_.insert(it, id);

  std::vector<double> data(weight_.flat().begin(), weight_.flat().end());
  data.insert(data.begin() + static_cast<std::ptrdiff_t>(row * feature_dim_), weight.begin(),
              weight.end());
  weight_ = Matrix(classes_.size(), feature_dim_, std::move(data));

  std::vector<double> b(bias_.begin(), bias_.end());
  b.insert(b.begin() + static_cast<std::ptrdiff_t>(row), bias);
  bias_ = Vector(std::move(b));
}

void Classifier::extend(std::span<const ClassId> new_classes, Rng& rng, double init_std) {
  ClassSet sorted(new_classes.begin(), new_classes.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("classifier: duplicate class in extension set");
  }
  for (ClassId id : sorted) {
    if (contains(id)) {
      throw InvalidArgument("classifier: class " + std::to_string(id) + " is already active");
    }
  }
  Vector w(feature_dim_);
  for (ClassId id : sorted) {
    for (double& v : w) v = init_std * gaussian_scalar(rng);
    insert_row(id, w.span(), 0.0);
  }
}

void Classifier::add_class(ClassId id, std::span<const double> weight, double bias) {
  if (weight.size() != feature_dim_) throw DimensionMismatch("classifier: weight row size");
  if (contains(id)) {
    throw InvalidArgument("classifier: class " + std::to_string(id) + " is already active");
  }
  insert_row(id, weight, bias);
}

Logits Classifier::logits(std::span<const double> features) const {
  if (features.size() != feature_dim_) {
    throw DimensionMismatch("classifier: feature dimension " + std::to_string(features.size()) +
                            ", expected " + std::to_string(feature_dim_));
  }
  Logits out(classes_.size());
  for (std::size_t r = 0; r < classes_.size(); ++r) out[r] = dot(weight_.row(r), features) + bias_[r];
  return out;
}

ClassId Classifier::predict(std::span<const double> features) const {
  if (classes_.empty()) throw InvalidArgument("classifier: no active classes");
  return classes_[argmax_class(logits(features).span())];
}

// ---------------------------------------------------------------------------
// Model

Model make_model(const HeadConfig& config, Rng& rng) {
  Model m;
  m.head = RepresentationHead::from_config(config, rng);
  m.classifier = Classifier(m.head.output_dim());
  return m;
}

ForwardResult forward(const Model& model, std::span<const double> x) {
  ForwardResult out;
  out.features = model.head.forward(x);
  out.logits = model.classifier.logits(out.features.span());
  return out;
}

Gradients zero_gradients(const Model& model) {
  Gradients g;
  g.head = model.head.zero_gradients();
  g.cls_weight = Matrix(model.classifier.num_classes(), model.classifier.feature_dim());
  g.cls_bias = Vector(model.classifier.num_classes());
  return g;
}

namespace {

std::vector<std::size_t> mask_rows(const Classifier& classifier, const ClassSet& mask) {
  std::vector<std::size_t> rows;
  rows.reserve(mask.size());
  for (ClassId id : mask) rows.push_back(classifier.row_of(id));
  return rows;
}

std::size_t label_position(const ClassSet& mask, ClassId label) {
  auto it = std::find(mask.begin(), mask.end(), label);
  if (it == mask.end()) {
    throw InvalidArgument("backward: label " + std::to_string(label) + " is not in the mask");
  }
  return static_cast<std::size_t>(it - mask.begin());
}

}  // namespace

double accumulate_classifier_backward(const Classifier& classifier,
                                      std::span<const double> features, ClassId label,
                                      const ClassSet& mask, const LossSpec& loss,
                                      Matrix& grad_weight, Vector& grad_bias, double scale,
                                      std::span<double> grad_features) {
  if (features.size() != classifier.feature_dim()) {
    throw DimensionMismatch("backward: feature dimension mismatch");
  }
  const std::size_t pos = label_position(mask, label);
  const auto rows = mask_rows(classifier, mask);
  const Matrix& w = classifier.weight();

  Logits logits(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k)
    logits[k] = dot(w.row(rows[k]), features) + classifier.bias()[rows[k]];
  const LossValue lv = compute_loss(loss, logits.span(), pos);

  if (!grad_features.empty()) std::fill(grad_features.begin(), grad_features.end(), 0.0);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double g = lv.grad[k];
    const double gs = scale * g;
    auto gw_row = grad_weight.row(rows[k]);
    for (std::size_t c = 0; c < features.size(); ++c) gw_row[c] += gs * features[c];
    grad_bias[rows[k]] += gs;
    if (!grad_features.empty()) {
      const auto w_row = w.row(rows[k]);
      for (std::size_t c = 0; c < features.size(); ++c) grad_features[c] += g * w_row[c];
    }
  }
  return lv.loss;
}

double accumulate_backward(const Model& model, std::span<const double> x, ClassId label,
                           const ClassSet& mask, const LossSpec& loss, Gradients& acc,
                           double scale) {
  RepresentationHead::Trace trace;
  const Vector features = model.head.forward(x, trace);
  const bool has_rep = model.head.num_layers() > 0;
  Vector grad_features(has_rep ? features.size() : 0);
  const double value =
      accumulate_classifier_backward(model.classifier, features.span(), label, mask, loss,
                                     acc.cls_weight, acc.cls_bias, scale, grad_features.span());
  if (has_rep) model.head.backward(trace, grad_features.span(), acc.head, scale);
  acc.loss += scale * value;
  return value;
}

Gradients backward(const Model& model, std::span<const double> x, ClassId label,
                   const ClassSet& mask, const LossSpec& loss) {
  Gradients g = zero_gradients(model);
  accumulate_backward(model, x, label, mask, loss, g, 1.0);
  return g;
}

void extend_classifier(Model& model, std::span<const ClassId> new_classes, Rng& rng) {
  model.classifier.extend(new_classes, rng);
}

Classifier clone_classifier(const Model& model) { return model.classifier; }

namespace {

std::string head_name(std::size_t layer, const char* what) {
  return "head." + std::to_string(layer) + "." + what;
}

std::string cls_name(ClassId id, const char* what) {
  return "cls." + std::to_string(id) + "." + what;
}

}  // namespace

ParamGroups param_groups(Classifier& classifier, const ClassSet& mask) {
  ParamGroups groups;
  for (ClassId id : mask) {
    const std::size_t r = classifier.row_of(id);
    groups.cls.push_back({cls_name(id, "weight"), classifier.weight().row(r)});
    groups.cls.push_back({cls_name(id, "bias"), classifier.bias().span().subspan(r, 1)});
  }
  return groups;
}

ParamGroups param_groups(Model& model, const ClassSet& mask, bool include_rep) {
  ParamGroups groups = param_groups(model.classifier, mask);
  if (include_rep) {
    for (std::size_t l = 0; l < model.head.num_layers(); ++l) {
      groups.rep.push_back({head_name(l, "weight"), model.head.weights()[l].flat()});
      groups.rep.push_back({head_name(l, "bias"), model.head.biases()[l].span()});
    }
  }
  return groups;
}

GradGroups grad_groups(const Matrix& grad_weight, const Vector& grad_bias,
                       const Classifier& classifier, const ClassSet& mask) {
  GradGroups groups;
  for (ClassId id : mask) {
    const std::size_t r = classifier.row_of(id);
    groups.cls.push_back({cls_name(id, "weight"), grad_weight.row(r)});
    groups.cls.push_back({cls_name(id, "bias"), grad_bias.span().subspan(r, 1)});
  }
  return groups;
}

GradGroups grad_groups(const Gradients& grads, const Model& model, const ClassSet& mask,
                       bool include_rep) {
  GradGroups groups = grad_groups(grads.cls_weight, grads.cls_bias, model.classifier, mask);
  if (include_rep) {
    for (std::size_t l = 0; l < grads.head.weights.size(); ++l) {
      groups.rep.push_back({head_name(l, "weight"), grads.head.weights[l].flat()});
      groups.rep.push_back({head_name(l, "bias"), grads.head.biases[l].span()});
    }
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Checkpoint

namespace {
constexpr std::uint32_t kModelVersion = 1;
}

std::vector<std::uint8_t> encode_model(const Model& model) {
  detail::ByteWriter w;
  w.magic("SLCM");
  w.u32(kModelVersion);
  w.u32(model.head.kind() == HeadKind::mlp ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(model.head.input_dim()));
  w.u32(static_cast<std::uint32_t>(model.head.output_dim()));
  w.u32(static_cast<std::uint32_t>(model.head.num_layers()));
  for (std::size_t l = 0; l < model.head.num_layers(); ++l) {
    const Matrix& m = model.head.weights()[l];
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    w.f32_array(m.flat());
    w.f32_array(model.head.biases()[l].span());
  }
  const Classifier& c = model.classifier;
  w.u32(static_cast<std::uint32_t>(c.num_classes()));
  for (std::size_t r = 0; r < c.num_classes(); ++r) {
    w.u32(c.classes()[r]);
    w.f32(static_cast<float>(c.bias()[r]));
    w.f32_array(c.weight().row(r));
  }
  return w.bytes();
}

Model decode_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "model checkpoint");
  r.expect_magic("SLCM");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw BadFormat("model checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint32_t kind = r.u32();
  const std::uint32_t input_dim = r.u32();
  const std::uint32_t feature_dim = r.u32();
  const std::uint32_t layers = r.u32();
  if (kind > 1 || input_dim == 0 || feature_dim == 0) {
    throw BadFormat("model checkpoint: invalid header");
  }
  Model model;
  if (kind == 0) {
    if (layers != 0 || input_dim != feature_dim) {
      throw BadFormat("model checkpoint: inconsistent identity head");
    }
    model.head = RepresentationHead::identity(input_dim);
  } else {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
    for (std::uint32_t l = 0; l < layers; ++l) {
      const std::uint32_t rows = r.u32();
      const std::uint32_t cols = r.u32();
      r.require(4ull * rows * cols);
      Matrix m(rows, cols);
      r.f32_array(m.flat());
      Vector b(rows);
      r.f32_array(b.span());
      weights.push_back(std::move(m));
      biases.push_back(std::move(b));
    }
    try {
      model.head = RepresentationHead::mlp(std::move(weights), std::move(biases));
    } catch (const InvalidArgument& e) {
      throw BadFormat(std::string("model checkpoint: ") + e.what());
    }
    if (model.head.input_dim() != input_dim || model.head.output_dim() != feature_dim) {
      throw BadFormat("model checkpoint: head dimensions disagree with header");
    }
  }
  model.classifier = Classifier(feature_dim);
  const std::uint32_t num_classes = r.u32();
  Vector row(feature_dim);
  for (std::uint32_t k = 0; k < num_classes; ++k) {
    const ClassId id = r.u32();
    const double bias = r.f32();
    r.f32_array(row.span());
    try {
      model.classifier.add_class(id, row.span(), bias);
    } catch (const InvalidArgument& e) {
      throw BadFormat(std::string("model checkpoint: ") + e.what());
    }
  }
  r.expect_end();
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  detail::write_file(path, encode_model(model));
}

Model load_model(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return decode_model(bytes);
}

}  // namespace slca
