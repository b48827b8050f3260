#include "slca/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "slca/errors.hpp"
#include "training.hpp"

namespace slca {

ClassSet Dataset::classes() const {
  ClassSet ids;
  for (const auto& r : records) ids.push_back(r.class_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

namespace {
constexpr std::uint32_t kDatasetVersion = 1;
}

std::vector<std::uint8_t> encode_dataset(const Dataset& dataset) {
  detail::ByteWriter w;
  w.magic("SLCF");
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(dataset.feature_dim));
  w.u64(dataset.records.size());
  for (const auto& r : dataset.records) {
    if (r.features.size() != dataset.feature_dim) {
      throw DimensionMismatch("save_dataset: record has dimension " +
                              std::to_string(r.features.size()) + ", header says " +
                              std::to_string(dataset.feature_dim));
    }
    w.u32(r.class_id);
    w.u8(static_cast<std::uint8_t>(r.split));
    w.f32_array(r.features.span());
  }
  return w.bytes();
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "feature dataset");
  r.expect_magic("SLCF");
  const std::uint32_t version = r.u32();
  if (version != kDatasetVersion) {
    throw BadFormat("feature dataset: unsupported version " + std::to_string(version));
  }
  Dataset ds;
  ds.feature_dim = r.u32();
  const std::uint64_t count = r.u64();
  const std::uint64_t record_bytes = 5 + 4ull * ds.feature_dim;
  if (count > r.remaining() / record_bytes || r.remaining() != count * record_bytes) {
    throw BadFormat("feature dataset: declared record count " + std::to_string(count) +
                    " disagrees with file size");
  }
  ds.records.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    FeatureRecord rec;
    rec.class_id = r.u32();
    const std::uint8_t flag = r.u8();
    if (flag > 1) throw BadFormat("feature dataset: invalid split flag");
    rec.split = static_cast<Split>(flag);
    rec.features = Vector(ds.feature_dim);
    r.f32_array(rec.features.span());
    ds.records.push_back(std::move(rec));
  }
  r.expect_end();
  return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  detail::write_file(path, encode_dataset(dataset));
}

Dataset load_dataset(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return decode_dataset(bytes);
}

SplitSpec make_split(std::span<const ClassId> classes, std::size_t num_tasks,
                     std::uint64_t seed) {
  ClassSet sorted(classes.begin(), classes.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (num_tasks == 0) throw InvalidArgument("make_split: num_tasks must be positive");
  if (num_tasks > sorted.size()) {
    throw InvalidArgument("make_split: " + std::to_string(num_tasks) + " tasks for " +
                          std::to_string(sorted.size()) + " classes");
  }
  Rng rng(seed);
  const auto order = detail::shuffled_indices(sorted.size(), rng);

  SplitSpec spec;
  spec.seed = seed;
  const std::size_t base = sorted.size() / num_tasks;
  const std::size_t extra = sorted.size() % num_tasks;
  std::size_t pos = 0;
  for (std::size_t t = 0; t < num_tasks; ++t) {
    const std::size_t size = base + (t < extra ? 1 : 0);
    ClassSet task;
    for (std::size_t i = 0; i < size; ++i) task.push_back(sorted[order[pos++]]);
    std::sort(task.begin(), task.end());
    spec.tasks.push_back(std::move(task));
  }
  return spec;
}

Dataset gen_synthetic(const SynthConfig& config) {
  if (!(config.separation >= 0.0)) throw InvalidArgument("gen_synthetic: separation must be >= 0");
  if (!std::isfinite(static_cast<float>(config.separation))) {
    throw InvalidArgument("gen_synthetic: separation does not fit in a 32-bit float");
  }
  if (config.num_classes == 0 || config.dim == 0) {
    throw InvalidArgument("gen_synthetic: classes and dim must be positive");
  }
  Rng root(config.seed);
  Dataset ds;
  ds.feature_dim = config.dim;
  for (std::size_t c = 0; c < config.num_classes; ++c) {
    Rng rng = root.split(c);
    Vector direction(config.dim);
    for (double& v : direction) v = gaussian_scalar(rng);
    const double len = norm(direction.span());
    Vector mean(config.dim);
    for (std::size_t i = 0; i < config.dim; ++i) mean[i] = config.separation * direction[i] / len;

    auto draw = [&](Split split, std::size_t count) {
      for (std::size_t n = 0; n < count; ++n) {
        FeatureRecord rec;
        rec.class_id = static_cast<ClassId>(c);
        rec.split = split;
        rec.features = Vector(config.dim);
        for (std::size_t i = 0; i < config.dim; ++i) {
          rec.features[i] = static_cast<float>(mean[i] + gaussian_scalar(rng));
        }
        ds.records.push_back(std::move(rec));
      }
    };
    draw(Split::train, config.train_per_class);
    draw(Split::test, config.test_per_class);
  }
  return ds;
}

}  // namespace slca
