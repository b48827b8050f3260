#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slca/alignment.hpp"
#include "slca/dataio.hpp"
#include "slca/model.hpp"
#include "slca/optimizer.hpp"
#include "slca/stats.hpp"

namespace slca {

/// Training regimes of the ablation grid.
enum class Method {
  seq_ft_uniform,    // one learning rate for every parameter
  seq_ft_fixed_rep,  // representation frozen, classifier trained
  fixed_rep_ca,      // frozen representation + classifier alignment
  fixed_rep_ca_ln,   // ... with logit normalization
  sl,                // slow learner (two rates)
  sl_ca,             // slow learner + classifier alignment
  sl_ca_ln,          // slow learner + alignment with logit normalization
  joint,             // all tasks at once (upper bound)
};

std::string_view to_string(Method method);
/// Throws InvalidArgument for unknown names.
Method parse_method(std::string_view name);

struct MethodTraits {
  bool train_rep = true;
  bool uniform_lr = false;
  bool align = false;
  bool logit_norm = false;
  bool joint = false;
  /// Requires lr_rep < lr_cls.
  bool slow_learner = false;
};

MethodTraits traits(Method method);

struct Example {
  Vector x;
  ClassId label = 0;
};

struct Task {
  ClassSet classes;
  std::vector<Example> train;
  std::vector<Example> test;
};

/// Ordered class-incremental tasks with pairwise disjoint class sets.
struct TaskStream {
  std::size_t input_dim = 0;
  std::vector<Task> tasks;

  /// Throws InvalidArgument on an empty stream, overlapping class sets,
  /// labels outside their task, or ragged inputs.
  void validate() const;
};

TaskStream make_task_stream(const Dataset& dataset, const SplitSpec& split);

struct RunConfig {
  Method method = Method::sl_ca_ln;
  OptimizerConfig optimizer;
  AlignConfig align;
  CovarianceMode covariance_mode = CovarianceMode::full;
  /// input_dim is taken from the stream.
  HeadConfig head;
  /// Learning rate of the seq_ft_uniform baseline.
  double uniform_lr = 0.005;
  std::uint64_t seed = 0;
  /// When false, no per-task evaluation (and no alignment) runs.
  bool evaluate = true;

  /// Throws InvalidArgument; slow-learner methods require lr_rep < lr_cls.
  void validate() const;
};

/// a_t: accuracy over every class seen so far, measured after task t.
struct AccuracyMatrix {
  std::vector<double> after_task;
};

/// a_T. Throws InvalidArgument when empty.
double last_acc(const AccuracyMatrix& m);
/// mean(a_1 .. a_T). Throws InvalidArgument when empty.
double inc_acc(const AccuracyMatrix& m);

struct RunResult {
  Model model;  // continual-training state (never aligned in place)
  StatsBank stats;
  AccuracyMatrix accuracy;
  /// Aligned classifier from the last evaluation of an alignment method.
  std::optional<Classifier> aligned;
};

RunResult run_stream(const TaskStream& stream, const RunConfig& config);

/// Accuracy over the test examples of tasks [0, up_to_task), predicting by
/// argmax over every active class of `classifier`. No task identity is used.
double evaluate(const RepresentationHead& head, const Classifier& classifier,
                const TaskStream& stream, std::size_t up_to_task);
double evaluate(const Model& model, const TaskStream& stream, std::size_t up_to_task);

/// Feature-space statistics of one task's training data under `head`.
std::vector<ClassStats> collect_task_stats(const RepresentationHead& head, const Task& task,
                                           CovarianceMode mode);

}  // namespace slca
