#include "slca/report.hpp"

#include <cmath>

#include "json.hpp"
#include "slca/errors.hpp"

namespace slca {

namespace {

using nlohmann::ordered_json;

ordered_json config_json(const RunConfig& c, const std::string& data_path, std::size_t num_tasks,
                         std::uint64_t split_seed) {
  ordered_json j;
  j["data"] = data_path;
  j["method"] = std::string(to_string(c.method));
  j["tasks"] = num_tasks;
  j["seed"] = c.seed;
  j["split_seed"] = split_seed;
  j["covariance_mode"] = c.covariance_mode == CovarianceMode::full ? "full" : "diagonal";
  j["uniform_lr"] = c.uniform_lr;
  j["optimizer"] = {
      {"lr_rep", c.optimizer.lr_rep},
      {"lr_cls", c.optimizer.lr_cls},
      {"momentum", c.optimizer.momentum},
      {"weight_decay", c.optimizer.weight_decay},
      {"batch_size", c.optimizer.batch_size},
      {"epochs_per_task", c.optimizer.epochs_per_task},
  };
  j["align"] = {
      {"samples_per_class", c.align.samples_per_class},
      {"tau", c.align.tau},
      {"epochs", c.align.epochs},
      {"batch_size", c.align.batch_size},
      {"lr", c.align.lr},
      {"momentum", c.align.momentum},
      {"logit_norm", traits(c.method).logit_norm && c.align.logit_norm},
  };
  j["head"] = {
      {"kind", c.head.kind == HeadKind::mlp ? "mlp" : "identity"},
      {"init", c.head.init == HeadInit::identity ? "identity" : "random"},
      {"hidden_dim", c.head.hidden_dim},
      {"output_dim", c.head.output_dim},
      {"layers", c.head.layers},
  };
  return j;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double std = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
  return {mean, std};
}

ordered_json run_json(const SeedRun& r) {
  ordered_json j;
  j["seed"] = r.seed;
  j["accuracy_per_task"] = r.accuracy.after_task;
  j["last_acc"] = last_acc(r.accuracy);
  j["inc_acc"] = inc_acc(r.accuracy);
  j["stats_storage_size"] = r.stats_storage_size;
  j["wall_time_seconds"] = r.wall_time_seconds;
  return j;
}

}  // namespace

std::string render_run_report(const RunConfig& config, const std::string& data_path,
                              std::size_t num_tasks, std::uint64_t split_seed,
                              const std::vector<SeedRun>& runs) {
  if (runs.empty()) throw InvalidArgument("report: no runs");
  ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = "run";
  j["config"] = config_json(config, data_path, num_tasks, split_seed);
  const ordered_json primary = run_json(runs.front());
  for (const auto& [k, v] : primary.items()) j[k] = v;
  if (runs.size() > 1) {
    std::vector<double> lasts, incs;
    ordered_json list = ordered_json::array();
    for (const auto& r : runs) {
      lasts.push_back(last_acc(r.accuracy));
      incs.push_back(inc_acc(r.accuracy));
      list.push_back(run_json(r));
    }
    const auto [lm, ls] = mean_std(lasts);
    const auto [im, is] = mean_std(incs);
    j["seed_sweep"] = {
        {"runs", list},
        {"last_acc_mean", lm},
        {"last_acc_std", ls},
        {"inc_acc_mean", im},
        {"inc_acc_std", is},
    };
  }
  return j.dump(2) + "\n";
}

}  // namespace slca
