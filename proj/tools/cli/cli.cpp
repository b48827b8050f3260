#include "cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cli/config_file.hpp"
#include "json.hpp"
#include "slca/slca.hpp"

namespace slca::cli {

namespace {

using nlohmann::ordered_json;

std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("error while writing '" + path + "'");
}

void write_json_report(const std::string& path, const ordered_json& j) {
  if (!path.empty()) write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
  std::string data;
  std::string method = "sl_ca_ln";
  std::size_t tasks = 10;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> split_seed;
  std::size_t seeds = 1;
  double lr_rep = 0.0001;
  double lr_cls = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::size_t batch_size = 128;
  std::size_t epochs = 20;
  double uniform_lr = 0.005;
  std::size_t align_epochs = 5;
  double align_lr = 0.01;
  double tau = 0.1;
  std::size_t samples_per_class = kDefaultSamplesPerClass;
  bool diag_cov = false;
  bool no_logit_norm = false;
  std::string head = "identity";
  std::string head_init = "random";
  std::size_t hidden = 64;
  std::size_t rep_dim = 0;
  std::size_t layers = 2;
  std::string output;
  std::string save_model;
  std::string save_stats;
  std::string save_aligned;
};

void add_align_flags(CLI::App* cmd, std::size_t& samples, double& tau, std::size_t& epochs,
                     double& lr, bool& no_ln) {
  cmd->add_option("--samples-per-class", samples, "Generated features per class")
      ->capture_default_str();
  cmd->add_option("--tau", tau, "Logit-normalization temperature")->capture_default_str();
  cmd->add_option("--align-epochs", epochs, "Classifier alignment epochs")->capture_default_str();
  cmd->add_option("--align-lr", lr, "Classifier alignment learning rate")->capture_default_str();
  cmd->add_flag("--no-logit-norm", no_ln, "Align with plain cross-entropy");
}

RunConfig to_run_config(const RunOptions& o) {
  RunConfig c;
  c.method = parse_method(o.method);
  c.optimizer.lr_rep = o.lr_rep;
  c.optimizer.lr_cls = o.lr_cls;
  c.optimizer.momentum = o.momentum;
  c.optimizer.weight_decay = o.weight_decay;
  c.optimizer.batch_size = o.batch_size;
  c.optimizer.epochs_per_task = o.epochs;
  c.uniform_lr = o.uniform_lr;
  c.align.samples_per_class = o.samples_per_class;
  c.align.tau = o.tau;
  c.align.epochs = o.align_epochs;
  c.align.lr = o.align_lr;
  c.align.momentum = o.momentum;
  c.align.batch_size = o.batch_size;
  c.align.logit_norm = !o.no_logit_norm;
  c.covariance_mode = o.diag_cov ? CovarianceMode::diagonal : CovarianceMode::full;
  if (o.head == "identity") {
    c.head.kind = HeadKind::identity;
    if (o.rep_dim != 0) throw InvalidArgument("--rep-dim requires --head mlp");
  } else if (o.head == "mlp") {
    c.head.kind = HeadKind::mlp;
    if (o.hidden == 0 || o.layers == 0) throw InvalidArgument("--hidden and --layers must be positive");
  } else {
    throw InvalidArgument("--head must be 'identity' or 'mlp'");
  }
  if (o.head_init == "random") {
    c.head.init = HeadInit::random;
  } else if (o.head_init == "identity") {
    c.head.init = HeadInit::identity;
  } else {
    throw InvalidArgument("--head-init must be 'random' or 'identity'");
  }
  c.head.hidden_dim = o.hidden;
  c.head.output_dim = o.rep_dim;
  c.head.layers = o.layers;
  c.seed = o.seed;
  if (o.tasks == 0) throw InvalidArgument("--tasks must be positive");
  if (o.seeds == 0) throw InvalidArgument("--seeds must be positive");
  c.validate();
  return c;
}

int cmd_run(const RunOptions& o, std::ostream& out) {
  RunConfig config = to_run_config(o);
  const Dataset dataset = load_dataset(o.data);
  if (config.head.kind == HeadKind::mlp && config.head.output_dim == 0) {
    config.head.output_dim = dataset.feature_dim;
  }
  const std::uint64_t split_seed = o.split_seed.value_or(o.seed);
  const SplitSpec split = make_split(dataset.classes(), o.tasks, split_seed);
  const TaskStream stream = make_task_stream(dataset, split);

  std::vector<SeedRun> runs;
  std::optional<RunResult> first;
  for (std::size_t s = 0; s < o.seeds; ++s) {
    RunConfig c = config;
    c.seed = o.seed + s;
    const auto start = std::chrono::steady_clock::now();
    RunResult result = run_stream(stream, c);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    runs.push_back({c.seed, result.accuracy, stats_storage_size(result.stats), elapsed.count()});
    if (!first) first = std::move(result);
  }

  const std::string report = render_run_report(config, o.data, o.tasks, split_seed, runs);
  if (!o.output.empty()) write_text(o.output, report);
  if (!o.save_model.empty()) save_model(first->model, o.save_model);
  if (!o.save_stats.empty()) save_stats(first->stats, o.save_stats);
  if (!o.save_aligned.empty()) {
    if (!first->aligned) throw InvalidArgument("--save-aligned requires an alignment method");
    save_model(Model{first->model.head, *first->aligned}, o.save_aligned);
  }

  out << "method " << to_string(config.method) << ", " << o.tasks << " tasks, seed " << o.seed
      << "\n";
  out << "Last-Acc: " << fixed6(last_acc(runs.front().accuracy))
      << "  Inc-Acc: " << fixed6(inc_acc(runs.front().accuracy)) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// gen-synth

struct SynthOptions {
  SynthConfig config;
  std::string out;
  std::string output;
};

int cmd_gen_synth(const SynthOptions& o, std::ostream& out) {
  const Dataset ds = gen_synthetic(o.config);
  save_dataset(ds, o.out);
  ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = "gen-synth";
  j["config"] = {{"classes", o.config.num_classes},
                 {"dim", o.config.dim},
                 {"train_per_class", o.config.train_per_class},
                 {"test_per_class", o.config.test_per_class},
                 {"separation", o.config.separation},
                 {"seed", o.config.seed}};
  j["out"] = o.out;
  j["records"] = ds.records.size();
  write_json_report(o.output, j);
  out << "wrote " << ds.records.size() << " records (" << o.config.num_classes << " classes, dim "
      << o.config.dim << ") to " << o.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// shared feature helpers

enum class SplitFilter { all, train, test };

SplitFilter parse_split_filter(const std::string& s) {
  if (s == "all") return SplitFilter::all;
  if (s == "train") return SplitFilter::train;
  if (s == "test") return SplitFilter::test;
  throw InvalidArgument("--split must be all, train or test");
}

bool keep(const FeatureRecord& r, SplitFilter f) {
  return f == SplitFilter::all || (f == SplitFilter::train) == (r.split == Split::train);
}

std::optional<RepresentationHead> load_head(const std::string& model_path,
                                            std::size_t input_dim) {
  if (model_path.empty()) return std::nullopt;
  Model m = load_model(model_path);
  if (m.head.input_dim() != input_dim) {
    throw InvalidArgument("model '" + model_path + "' expects inputs of dimension " +
                          std::to_string(m.head.input_dim()) + ", data has " +
                          std::to_string(input_dim));
  }
  return std::move(m.head);
}

Vector map_features(const std::optional<RepresentationHead>& head, const Vector& x) {
  return head ? head->forward(x.span()) : x;
}

// ---------------------------------------------------------------------------
// probe

struct ProbeOptions {
  std::string data;
  std::string model;
  ProbeConfig config;
  std::string output;
};

int cmd_probe(const ProbeOptions& o, std::ostream& out) {
  if (o.config.epochs == 0 || !(o.config.lr > 0.0) || o.config.batch_size == 0) {
    throw InvalidArgument("probe: epochs, lr and batch size must be positive");
  }
  const Dataset ds = load_dataset(o.data);
  const auto head = load_head(o.model, ds.feature_dim);
  LabeledFeatures train, test;
  for (const auto& r : ds.records) {
    LabeledFeatures& dst = r.split == Split::train ? train : test;
    dst.features.push_back(map_features(head, r.features));
    dst.labels.push_back(r.class_id);
  }
  const double acc = linear_probe(train, test, o.config);
  ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = "probe";
  j["config"] = {{"data", o.data},
                 {"model", o.model},
                 {"epochs", o.config.epochs},
                 {"lr", o.config.lr},
                 {"momentum", o.config.momentum},
                 {"batch_size", o.config.batch_size},
                 {"seed", o.config.seed}};
  j["accuracy"] = acc;
  write_json_report(o.output, j);
  out << "probe accuracy: " << fixed6(acc) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// cka

struct CkaOptions {
  std::string a;
  std::string b;
  std::string model_a;
  std::string model_b;
  std::string split = "all";
  std::string output;
};

FeatureSnapshot read_snapshot(const std::string& path, const std::string& model_path,
                              SplitFilter filter) {
  const Dataset ds = load_dataset(path);
  const auto head = load_head(model_path, ds.feature_dim);
  std::vector<Vector> rows;
  for (const auto& r : ds.records) {
    if (keep(r, filter)) rows.push_back(map_features(head, r.features));
  }
  if (rows.empty()) throw InvalidArgument("snapshot '" + path + "' has no rows");
  const std::size_t d = rows.front().size();
  FeatureSnapshot snap{Matrix(rows.size(), d), path};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), snap.features.row(i).begin());
  }
  return snap;
}

int cmd_cka(const CkaOptions& o, std::ostream& out) {
  const SplitFilter filter = parse_split_filter(o.split);
  const FeatureSnapshot a = read_snapshot(o.a, o.model_a, filter);
  const FeatureSnapshot b = read_snapshot(o.b, o.model_b, filter);
  const double value = cka(a, b);
  ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = "cka";
  j["config"] = {{"a", o.a}, {"b", o.b}, {"model_a", o.model_a}, {"model_b", o.model_b},
                 {"split", o.split}};
  j["rows"] = a.features.rows();
  j["cka"] = value;
  write_json_report(o.output, j);
  out << fixed6(value) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// align-only

struct AlignOptions {
  std::string model;
  std::string stats;
  std::string out;
  std::string data;
  std::uint64_t seed = 0;
  AlignConfig config;
  bool no_logit_norm = false;
  std::string output;
};

int cmd_align_only(AlignOptions o, std::ostream& out) {
  o.config.logit_norm = !o.no_logit_norm;
  o.config.validate();
  const Model model = load_model(o.model);
  const StatsBank bank = load_stats(o.stats);
  std::string out_path = o.out;
  if (out_path.empty()) {
    std::filesystem::path p(o.model);
    out_path = (p.parent_path() / (p.stem().string() + ".aligned.slcm")).string();
  }
  Rng rng(o.seed);
  const Classifier aligned = align_classifier(model.classifier, bank, o.config, rng);
  const Model result{model.head, aligned};
  save_model(result, out_path);

  ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = "align-only";
  j["config"] = {{"model", o.model},
                 {"stats", o.stats},
                 {"seed", o.seed},
                 {"samples_per_class", o.config.samples_per_class},
                 {"tau", o.config.tau},
                 {"epochs", o.config.epochs},
                 {"lr", o.config.lr},
                 {"logit_norm", o.config.logit_norm}};
  j["out"] = out_path;
  j["classes"] = aligned.num_classes();
  out << "wrote aligned model (" << aligned.num_classes() << " classes) to " << out_path << "\n";

  if (!o.data.empty()) {
    const Dataset ds = load_dataset(o.data);
    if (ds.feature_dim != model.head.input_dim()) {
      throw InvalidArgument("align-only: data dimension does not match the model");
    }
    TaskStream stream;
    stream.input_dim = ds.feature_dim;
    Task task;
    task.classes = aligned.classes();
    for (const auto& r : ds.records) {
      if (r.split == Split::test && aligned.contains(r.class_id)) {
        task.test.push_back({r.features, r.class_id});
      }
    }
    stream.tasks.push_back(std::move(task));
    const double before = evaluate(model, stream, 1);
    const double after = evaluate(result, stream, 1);
    j["accuracy_before"] = before;
    j["accuracy_after"] = after;
    out << "accuracy before: " << fixed6(before) << "  after: " << fixed6(after) << "\n";
  }
  write_json_report(o.output, j);
  return kOk;
}

// ---------------------------------------------------------------------------
// snapshot

struct SnapshotOptions {
  std::string data;
  std::string model;
  std::string out;
  std::string split = "all";
};

int cmd_snapshot(const SnapshotOptions& o, std::ostream& out) {
  const SplitFilter filter = parse_split_filter(o.split);
  const Dataset ds = load_dataset(o.data);
  const auto head = load_head(o.model, ds.feature_dim);
  Dataset snap;
  snap.feature_dim = head ? head->output_dim() : ds.feature_dim;
  for (const auto& r : ds.records) {
    if (keep(r, filter)) snap.records.push_back({r.class_id, r.split, map_features(head, r.features)});
  }
  save_dataset(snap, o.out);
  out << "wrote " << snap.records.size() << " feature rows to " << o.out << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Slow Learner with Classifier Alignment: class-incremental learning engine",
               "slca"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;

  // run
  RunOptions ro;
  auto* run_cmd = app.add_subcommand("run", "Run a continual-learning stream");
  run_cmd->add_option("--data", ro.data, "SLCF feature dataset")->required();
  run_cmd->add_option("--method", ro.method,
                      "seq_ft_uniform|seq_ft_fixed_rep|fixed_rep_ca|fixed_rep_ca_ln|sl|sl_ca|"
                      "sl_ca_ln|joint")
      ->capture_default_str();
  run_cmd->add_option("--tasks", ro.tasks, "Number of tasks")->capture_default_str();
  run_cmd->add_option("--seed", ro.seed, "Run seed")->capture_default_str();
  run_cmd->add_option("--split-seed", ro.split_seed, "Class split seed (default: --seed)");
  run_cmd->add_option("--seeds", ro.seeds, "Number of consecutive seeds to sweep")
      ->capture_default_str();
  run_cmd->add_option("--lr-rep", ro.lr_rep, "Representation learning rate")
      ->capture_default_str();
  run_cmd->add_option("--lr-cls", ro.lr_cls, "Classifier learning rate")->capture_default_str();
  run_cmd->add_option("--momentum", ro.momentum, "SGD momentum")->capture_default_str();
  run_cmd->add_option("--weight-decay", ro.weight_decay, "SGD weight decay")
      ->capture_default_str();
  run_cmd->add_option("--batch-size", ro.batch_size, "Mini-batch size")->capture_default_str();
  run_cmd->add_option("--epochs", ro.epochs, "Epochs per task")->capture_default_str();
  run_cmd->add_option("--uniform-lr", ro.uniform_lr, "Learning rate of seq_ft_uniform")
      ->capture_default_str();
  add_align_flags(run_cmd, ro.samples_per_class, ro.tau, ro.align_epochs, ro.align_lr,
                  ro.no_logit_norm);
  run_cmd->add_flag("--diag-cov", ro.diag_cov, "Store per-class variances only");
  run_cmd->add_option("--head", ro.head, "identity|mlp")->capture_default_str();
  run_cmd->add_option("--head-init", ro.head_init, "MLP init: random|identity")
      ->capture_default_str();
  run_cmd->add_option("--hidden", ro.hidden, "MLP hidden width")->capture_default_str();
  run_cmd->add_option("--rep-dim", ro.rep_dim, "MLP output dimension (default: input dim)");
  run_cmd->add_option("--layers", ro.layers, "MLP layer count")->capture_default_str();
  run_cmd->add_option("--output", ro.output, "JSON report path");
  run_cmd->add_option("--save-model", ro.save_model, "Write the continual model (SLCM)");
  run_cmd->add_option("--save-stats", ro.save_stats, "Write the class statistics (SLCS)");
  run_cmd->add_option("--save-aligned", ro.save_aligned, "Write the last aligned model (SLCM)");
  run_cmd->add_option("--config", config_path, "key = value config file");

  // gen-synth
  SynthOptions so;
  auto* synth_cmd = app.add_subcommand("gen-synth", "Write a synthetic Gaussian benchmark");
  synth_cmd->add_option("--classes", so.config.num_classes)->capture_default_str();
  synth_cmd->add_option("--dim", so.config.dim)->capture_default_str();
  synth_cmd->add_option("--train-per-class", so.config.train_per_class)->capture_default_str();
  synth_cmd->add_option("--test-per-class", so.config.test_per_class)->capture_default_str();
  synth_cmd->add_option("--sep", so.config.separation, "Class mean distance from origin")
      ->capture_default_str();
  synth_cmd->add_option("--seed", so.config.seed)->capture_default_str();
  synth_cmd->add_option("--out", so.out, "SLCF output path")->required();
  synth_cmd->add_option("--output", so.output, "JSON report path");
  synth_cmd->add_option("--config", config_path, "key = value config file");

  // probe
  ProbeOptions po;
  auto* probe_cmd = app.add_subcommand("probe", "Linear probe on frozen features");
  probe_cmd->add_option("--data", po.data, "SLCF feature dataset")->required();
  probe_cmd->add_option("--model", po.model, "Map features through this model's head");
  probe_cmd->add_option("--epochs", po.config.epochs)->capture_default_str();
  probe_cmd->add_option("--lr", po.config.lr)->capture_default_str();
  probe_cmd->add_option("--momentum", po.config.momentum)->capture_default_str();
  probe_cmd->add_option("--batch-size", po.config.batch_size)->capture_default_str();
  probe_cmd->add_option("--seed", po.config.seed)->capture_default_str();
  probe_cmd->add_option("--output", po.output, "JSON report path");
  probe_cmd->add_option("--config", config_path, "key = value config file");

  // cka
  CkaOptions co;
  auto* cka_cmd = app.add_subcommand("cka", "Linear CKA between two feature snapshots");
  cka_cmd->add_option("--a", co.a, "First SLCF snapshot")->required();
  cka_cmd->add_option("--b", co.b, "Second SLCF snapshot")->required();
  cka_cmd->add_option("--model-a", co.model_a, "Map --a through this model's head");
  cka_cmd->add_option("--model-b", co.model_b, "Map --b through this model's head");
  cka_cmd->add_option("--split", co.split, "all|train|test")->capture_default_str();
  cka_cmd->add_option("--output", co.output, "JSON report path");
  cka_cmd->add_option("--config", config_path, "key = value config file");

  // align-only
  AlignOptions ao;
  auto* align_cmd = app.add_subcommand("align-only", "Align a saved classifier from saved stats");
  align_cmd->add_option("--model", ao.model, "SLCM checkpoint")->required();
  align_cmd->add_option("--stats", ao.stats, "SLCS statistics")->required();
  align_cmd->add_option("--out", ao.out, "Aligned SLCM path (default: <model>.aligned.slcm)");
  align_cmd->add_option("--data", ao.data, "Evaluate before/after on this dataset's test split");
  align_cmd->add_option("--seed", ao.seed)->capture_default_str();
  add_align_flags(align_cmd, ao.config.samples_per_class, ao.config.tau, ao.config.epochs,
                  ao.config.lr, ao.no_logit_norm);
  align_cmd->add_option("--momentum", ao.config.momentum)->capture_default_str();
  align_cmd->add_option("--batch-size", ao.config.batch_size)->capture_default_str();
  align_cmd->add_option("--output", ao.output, "JSON report path");
  align_cmd->add_option("--config", config_path, "key = value config file");

  // snapshot
  SnapshotOptions sno;
  auto* snap_cmd = app.add_subcommand("snapshot", "Write features of a dataset under a model");
  snap_cmd->add_option("--data", sno.data, "SLCF input")->required();
  snap_cmd->add_option("--model", sno.model, "SLCM checkpoint")->required();
  snap_cmd->add_option("--out", sno.out, "SLCF output")->required();
  snap_cmd->add_option("--split", sno.split, "all|train|test")->capture_default_str();
  snap_cmd->add_option("--config", config_path, "key = value config file");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidConfig;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(ro, out);
    if (synth_cmd->parsed()) return cmd_gen_synth(so, out);
    if (probe_cmd->parsed()) return cmd_probe(po, out);
    if (cka_cmd->parsed()) return cmd_cka(co, out);
    if (align_cmd->parsed()) return cmd_align_only(ao, out);
    if (snap_cmd->parsed()) return cmd_snapshot(sno, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kInvalidConfig;
  }
  return kInvalidConfig;
}

}  // namespace slca::cli
