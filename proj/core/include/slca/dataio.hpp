#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "slca/linalg.hpp"
#include "slca/types.hpp"

namespace slca {

enum class Split : std::uint8_t { train = 0, test = 1 };

struct FeatureRecord {
  ClassId class_id = 0;
  Split split = Split::train;
  Vector features;

  friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

/// In-memory form of an SLCF feature file. Values are held in 64-bit but are
/// written as 32-bit floats.
struct Dataset {
  std::size_t feature_dim = 0;
  std::vector<FeatureRecord> records;

  /// Sorted distinct class ids.
  ClassSet classes() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// SLCF layout, all little-endian:
///   "SLCF" | u32 version (1) | u32 feature_dim | u64 record_count |
///   record_count x (u32 class_id | u8 split | feature_dim x f32)
std::vector<std::uint8_t> encode_dataset(const Dataset& dataset);
/// Throws BadFormat on a bad magic or version, truncation, or trailing bytes.
Dataset decode_dataset(std::span<const std::uint8_t> bytes);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

/// Class partition into tasks.
struct SplitSpec {
  std::vector<ClassSet> tasks;  // each sorted
  std::uint64_t seed = 0;
};

/// Random permutation of the classes (by seed) chunked in order; when the
/// count does not divide evenly the earlier tasks get one extra class.
SplitSpec make_split(std::span<const ClassId> classes, std::size_t num_tasks,
                     std::uint64_t seed);

struct SynthConfig {
  std::size_t num_classes = 20;
  std::size_t dim = 16;
  std::size_t train_per_class = 100;
  std::size_t test_per_class = 50;
  /// Distance of each class mean from the origin, along a random direction.
  double separation = 8.0;
  std::uint64_t seed = 0;
};

/// Unit-covariance Gaussian classes. Values are rounded to 32-bit so that a
/// save/load round trip is exact.
Dataset gen_synthetic(const SynthConfig& config);

}  // namespace slca
