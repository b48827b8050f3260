#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "slca/linalg.hpp"
#include "slca/rng.hpp"
#include "slca/types.hpp"

namespace slca {

enum class CovarianceMode : std::uint8_t { full = 0, diagonal = 1 };

/// Gaussian summary of one class's features.
struct ClassStats {
  ClassId class_id = 0;
  std::size_t count = 0;
  Vector mean;
  CovarianceMode mode = CovarianceMode::full;
  Matrix cov;  // full mode, d x d
  Vector var;  // diagonal mode, d

  std::size_t dim() const noexcept { return mean.size(); }

  friend bool operator==(const ClassStats&, const ClassStats&) = default;
};

/// Mean and unbiased covariance (divisor N-1; zero when N == 1). Sums are
/// compensated and taken in input order.
ClassStats collect_class_stats(ClassId class_id, std::span<const Vector> features,
                               CovarianceMode mode);

/// Draws `count` features from N(mean, cov). Full covariance goes through
/// cholesky_jittered; the diagonal mode scales each coordinate by its
/// standard deviation.
std::vector<Vector> sample_class_features(const ClassStats& stats, std::size_t count, Rng& rng);

inline constexpr std::size_t kDefaultSamplesPerClass = 256;

/// Per-class statistics for every class seen so far.
class StatsBank {
 public:
  StatsBank() = default;
  StatsBank(std::size_t feature_dim, CovarianceMode mode) : feature_dim_(feature_dim), mode_(mode) {}

  std::size_t feature_dim() const noexcept { return feature_dim_; }
  CovarianceMode mode() const noexcept { return mode_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(ClassId id) const { return entries_.contains(id); }
  const ClassStats& at(ClassId id) const;
  const std::map<ClassId, ClassStats>& entries() const noexcept { return entries_; }

  /// Adds or replaces an entry. Throws on dimension or mode mismatch.
  void put(ClassStats stats);

  friend bool operator==(const StatsBank&, const StatsBank&) = default;

 private:
  std::size_t feature_dim_ = 0;
  CovarianceMode mode_ = CovarianceMode::full;
  std::map<ClassId, ClassStats> entries_;
};

/// Number of stored scalars: d per mean plus d (diagonal) or d*d (full).
std::size_t stats_storage_size(const StatsBank& bank);

/// Binary layout "SLCS", version 1, little-endian, 32-bit floats.
std::vector<std::uint8_t> encode_stats(const StatsBank& bank);
StatsBank decode_stats(std::span<const std::uint8_t> bytes);
void save_stats(const StatsBank& bank, const std::filesystem::path& path);
StatsBank load_stats(const std::filesystem::path& path);

}  // namespace slca
