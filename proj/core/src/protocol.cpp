#include "slca/protocol.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <string>

#include "slca/errors.hpp"
#include "slca/parallel.hpp"
#include "training.hpp"

namespace slca {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 8> kMethodNames{{
    {Method::seq_ft_uniform, "seq_ft_uniform"},
    {Method::seq_ft_fixed_rep, "seq_ft_fixed_rep"},
    {Method::fixed_rep_ca, "fixed_rep_ca"},
    {Method::fixed_rep_ca_ln, "fixed_rep_ca_ln"},
    {Method::sl, "sl"},
    {Method::sl_ca, "sl_ca"},
    {Method::sl_ca_ln, "sl_ca_ln"},
    {Method::joint, "joint"},
}};

// Child stream ids of the run seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kExtendStream = 1000;
constexpr std::uint64_t kShuffleStream = 2000;
constexpr std::uint64_t kAlignStream = 3000;

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [m, n] : kMethodNames) {
    if (n == name) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

MethodTraits traits(Method method) {
  MethodTraits t;
  switch (method) {
    case Method::seq_ft_uniform:
      t.uniform_lr = true;
      break;
    case Method::seq_ft_fixed_rep:
      t.train_rep = false;
      break;
    case Method::fixed_rep_ca:
      t.train_rep = false;
      t.align = true;
      break;
    case Method::fixed_rep_ca_ln:
      t.train_rep = false;
      t.align = true;
      t.logit_norm = true;
      break;
    case Method::sl:
      t.slow_learner = true;
      break;
    case Method::sl_ca:
      t.slow_learner = true;
      t.align = true;
      break;
    case Method::sl_ca_ln:
      t.slow_learner = true;
      t.align = true;
      t.logit_norm = true;
      break;
    case Method::joint:
      t.joint = true;
      break;
  }
  return t;
}

void TaskStream::validate() const {
  if (tasks.empty()) throw InvalidArgument("task stream: no tasks");
  if (input_dim == 0) throw InvalidArgument("task stream: zero input dimension");
  ClassSet seen;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const Task& task = tasks[t];
    if (task.classes.empty()) {
      throw InvalidArgument("task stream: task " + std::to_string(t) + " has no classes");
    }
    for (ClassId c : task.classes) {
      if (std::find(seen.begin(), seen.end(), c) != seen.end()) {
        throw InvalidArgument("task stream: class " + std::to_string(c) +
                              " appears in more than one task");
      }
      seen.push_back(c);
    }
    auto check = [&](const std::vector<Example>& examples) {
      for (const auto& e : examples) {
        if (e.x.size() != input_dim) throw DimensionMismatch("task stream: ragged inputs");
        if (!std::binary_search(task.classes.begin(), task.classes.end(), e.label)) {
          throw InvalidArgument("task stream: label " + std::to_string(e.label) +
                                " outside task " + std::to_string(t));
        }
      }
    };
    check(task.train);
    check(task.test);
  }
}

TaskStream make_task_stream(const Dataset& dataset, const SplitSpec& split) {
  TaskStream stream;
  stream.input_dim = dataset.feature_dim;
  std::map<ClassId, std::size_t> task_of;
  for (std::size_t t = 0; t < split.tasks.size(); ++t) {
    Task task;
    task.classes = split.tasks[t];
    std::sort(task.classes.begin(), task.classes.end());
    for (ClassId c : task.classes) task_of[c] = t;
    stream.tasks.push_back(std::move(task));
  }
  for (const auto& rec : dataset.records) {
    auto it = task_of.find(rec.class_id);
    if (it == task_of.end()) continue;
    Task& task = stream.tasks[it->second];
    (rec.split == Split::train ? task.train : task.test).push_back({rec.features, rec.class_id});
  }
  return stream;
}

void RunConfig::validate() const {
  optimizer.validate();
  align.validate();
  if (!(uniform_lr > 0.0)) throw InvalidArgument("run: uniform_lr must be positive");
  if (traits(method).slow_learner && !optimizer.slow_learner_contract()) {
    throw InvalidArgument("run: method " + std::string(to_string(method)) +
                          " requires lr_rep < lr_cls");
  }
}

double last_acc(const AccuracyMatrix& m) {
  if (m.after_task.empty()) throw InvalidArgument("last_acc: empty accuracy matrix");
  return m.after_task.back();
}

double inc_acc(const AccuracyMatrix& m) {
  if (m.after_task.empty()) throw InvalidArgument("inc_acc: empty accuracy matrix");
  return std::accumulate(m.after_task.begin(), m.after_task.end(), 0.0) /
         static_cast<double>(m.after_task.size());
}

double evaluate(const RepresentationHead& head, const Classifier& classifier,
                const TaskStream& stream, std::size_t up_to_task) {
  if (up_to_task > stream.tasks.size()) {
    throw InvalidArgument("evaluate: up_to_task exceeds the number of tasks");
  }
  std::vector<const Example*> examples;
  for (std::size_t t = 0; t < up_to_task; ++t)
    for (const auto& e : stream.tasks[t].test) examples.push_back(&e);
  if (examples.empty()) return 0.0;

  const std::size_t chunks = std::min<std::size_t>(examples.size(), 64);
  std::vector<std::size_t> correct(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    for (std::size_t i = c; i < examples.size(); i += chunks) {
      const Example& e = *examples[i];
      const Vector f = head.forward(e.x.span());
      if (classifier.predict(f.span()) == e.label) ++correct[c];
    }
  });
  const std::size_t total_correct = std::accumulate(correct.begin(), correct.end(), std::size_t{0});
  return static_cast<double>(total_correct) / static_cast<double>(examples.size());
}

double evaluate(const Model& model, const TaskStream& stream, std::size_t up_to_task) {
  return evaluate(model.head, model.classifier, stream, up_to_task);
}

std::vector<ClassStats> collect_task_stats(const RepresentationHead& head, const Task& task,
                                           CovarianceMode mode) {
  std::vector<ClassStats> out(task.classes.size());
  parallel_for(task.classes.size(), [&](std::size_t k) {
    std::vector<Vector> features;
    for (const auto& e : task.train) {
      if (e.label == task.classes[k]) features.push_back(head.forward(e.x.span()));
    }
    out[k] = collect_class_stats(task.classes[k], features, mode);
  });
  return out;
}

namespace {

/// One pass of mini-batch training of the whole model on `data`.
void train_model(Model& model, const std::vector<const Example*>& data, const ClassSet& mask,
                 const OptimizerConfig& optimizer, bool train_rep, Rng& rng) {
  if (data.empty()) return;
  if (!train_rep) {
    // Frozen representation: precompute features once.
    detail::LabeledSet feats;
    for (const Example* e : data) {
      feats.features.push_back(model.head.forward(e->x.span()));
      feats.labels.push_back(e->label);
    }
    detail::train_classifier(model.classifier, feats, mask, LossSpec::cross_entropy(), optimizer,
                             rng);
    return;
  }
  Sgd sgd(optimizer);
  ParamGroups params = param_groups(model, mask, true);
  Gradients grads = zero_gradients(model);
  const GradGroups grad_views = grad_groups(grads, model, mask, true);
  const LossSpec loss = LossSpec::cross_entropy();

  auto clear = [&] {
    for (auto& w : grads.head.weights) std::fill(w.flat().begin(), w.flat().end(), 0.0);
    for (auto& b : grads.head.biases) std::fill(b.begin(), b.end(), 0.0);
    std::fill(grads.cls_weight.flat().begin(), grads.cls_weight.flat().end(), 0.0);
    std::fill(grads.cls_bias.begin(), grads.cls_bias.end(), 0.0);
    grads.loss = 0.0;
  };

  for (std::size_t epoch = 0; epoch < optimizer.epochs_per_task; ++epoch) {
    const auto order = detail::shuffled_indices(data.size(), rng);
    for (std::size_t start = 0; start < order.size(); start += optimizer.batch_size) {
      const std::size_t stop = std::min(order.size(), start + optimizer.batch_size);
      const double scale = 1.0 / static_cast<double>(stop - start);
      clear();
      for (std::size_t i = start; i < stop; ++i) {
        const Example& e = *data[order[i]];
        accumulate_backward(model, e.x.span(), e.label, mask, loss, grads, scale);
      }
      sgd.step(params, grad_views);
    }
  }
}

OptimizerConfig task_optimizer(const RunConfig& config, const MethodTraits& t) {
  OptimizerConfig opt = config.optimizer;
  if (t.uniform_lr) {
    opt.lr_rep = config.uniform_lr;
    opt.lr_cls = config.uniform_lr;
  }
  return opt;
}

}  // namespace

RunResult run_stream(const TaskStream& stream, const RunConfig& config) {
  config.validate();
  stream.validate();
  const MethodTraits t = traits(config.method);
  const Rng root(config.seed);

  HeadConfig head = config.head;
  head.input_dim = stream.input_dim;
  if (head.kind == HeadKind::identity) head.output_dim = stream.input_dim;
  Rng init_rng = root.split(kInitStream);

  RunResult result;
  result.model = make_model(head, init_rng);
  result.stats = StatsBank(result.model.head.output_dim(), config.covariance_mode);
  Model& model = result.model;
  const OptimizerConfig opt = task_optimizer(config, t);

  if (t.joint) {
    ClassSet all;
    std::vector<const Example*> data;
    for (const Task& task : stream.tasks) {
      all.insert(all.end(), task.classes.begin(), task.classes.end());
      for (const auto& e : task.train) data.push_back(&e);
    }
    std::sort(all.begin(), all.end());
    Rng extend_rng = root.split(kExtendStream);
    extend_classifier(model, all, extend_rng);
    Rng shuffle_rng = root.split(kShuffleStream);
    train_model(model, data, all, opt, t.train_rep, shuffle_rng);
    if (config.evaluate) {
      result.accuracy.after_task.push_back(evaluate(model, stream, stream.tasks.size()));
    }
    return result;
  }

  AlignConfig align = config.align;
  align.logit_norm = t.logit_norm && config.align.logit_norm;

  for (std::size_t ti = 0; ti < stream.tasks.size(); ++ti) {
    const Task& task = stream.tasks[ti];
    Rng extend_rng = root.split(kExtendStream + ti);
    extend_classifier(model, task.classes, extend_rng);

    std::vector<const Example*> data;
    for (const auto& e : task.train) data.push_back(&e);
    Rng shuffle_rng = root.split(kShuffleStream + ti);
    train_model(model, data, task.classes, opt, t.train_rep, shuffle_rng);

    if (t.align) {
      for (auto& s : collect_task_stats(model.head, task, config.covariance_mode)) {
        result.stats.put(std::move(s));
      }
    }

    if (!config.evaluate) continue;
    if (t.align) {
      Rng align_rng = root.split(kAlignStream + ti);
      result.aligned = align_classifier(model.classifier, result.stats, align, align_rng);
      result.accuracy.after_task.push_back(evaluate(model.head, *result.aligned, stream, ti + 1));
    } else {
      result.accuracy.after_task.push_back(evaluate(model, stream, ti + 1));
    }
  }
  return result;
}

}  // namespace slca
