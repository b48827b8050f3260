#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "slca/protocol.hpp"

namespace slca {

inline constexpr int kReportSchema = 1;

struct SeedRun {
  std::uint64_t seed = 0;
  AccuracyMatrix accuracy;
  std::size_t stats_storage_size = 0;
  double wall_time_seconds = 0.0;
};

/// Run report: config echo plus per-task accuracies, Last-Acc, Inc-Acc,
/// stats storage and wall time. The first run fills the top-level fields;
/// a "seed_sweep" block with mean and standard deviation is added when
/// several seeds ran. Wall-time values are the only nondeterministic
/// entries and each sits on its own line.
std::string render_run_report(const RunConfig& config, const std::string& data_path,
                              std::size_t num_tasks, std::uint64_t split_seed,
                              const std::vector<SeedRun>& runs);

}  // namespace slca
