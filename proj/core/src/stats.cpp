#include "slca/stats.hpp"

#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "slca/errors.hpp"

namespace slca {

namespace {

/// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

ClassStats collect_class_stats(ClassId class_id, std::span<const Vector> features,
                               CovarianceMode mode) {
  if (features.empty()) throw InvalidArgument("collect_class_stats: empty feature batch");
  const std::size_t d = features.front().size();
  if (d == 0) throw InvalidArgument("collect_class_stats: zero-dimensional features");
  for (const auto& f : features) {
    if (f.size() != d) throw DimensionMismatch("collect_class_stats: ragged feature batch");
  }
  const std::size_t n = features.size();

  ClassStats s;
  s.class_id = class_id;
  s.count = n;
  s.mode = mode;
  s.mean = Vector(d);
  for (std::size_t i = 0; i < d; ++i) {
    CompensatedSum acc;
    for (const auto& f : features) acc.add(f[i]);
    s.mean[i] = acc.value() / static_cast<double>(n);
  }

  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  auto centered_product = [&](std::size_t i, std::size_t j) {
    if (n == 1) return 0.0;
    CompensatedSum acc;
    for (const auto& f : features) acc.add((f[i] - s.mean[i]) * (f[j] - s.mean[j]));
    return acc.value() / denom;
  };

  if (mode == CovarianceMode::diagonal) {
    s.var = Vector(d);
    for (std::size_t i = 0; i < d; ++i) s.var[i] = centered_product(i, i);
  } else {
    s.cov = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double c = centered_product(i, j);
        s.cov(i, j) = c;
        s.cov(j, i) = c;
      }
    }
  }
  return s;
}

std::vector<Vector> sample_class_features(const ClassStats& stats, std::size_t count, Rng& rng) {
  if (count == 0) throw InvalidArgument("sample_class_features: count must be positive");
  const std::size_t d = stats.dim();
  if (stats.mode == CovarianceMode::full) {
    return sample_mvn(stats.mean, cholesky_jittered(stats.cov), count, rng);
  }
  if (stats.var.size() != d) throw DimensionMismatch("sample_class_features: variance size");
  Vector stddev(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (stats.var[i] < 0.0) throw NumericalError("sample_class_features: negative variance");
    stddev[i] = std::sqrt(stats.var[i]);
  }
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Vector x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = stats.mean[i] + stddev[i] * gaussian_scalar(rng);
    out.push_back(std::move(x));
  }
  return out;
}

const ClassStats& StatsBank::at(ClassId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw InvalidArgument("stats bank: no statistics for class " + std::to_string(id));
  }
  return it->second;
}

void StatsBank::put(ClassStats stats) {
  if (stats.dim() != feature_dim_) {
    throw DimensionMismatch("stats bank: class " + std::to_string(stats.class_id) +
                            " has dimension " + std::to_string(stats.dim()) + ", bank has " +
                            std::to_string(feature_dim_));
  }
  if (stats.mode != mode_) throw InvalidArgument("stats bank: covariance mode mismatch");
  entries_.insert_or_assign(stats.class_id, std::move(stats));
}

std::size_t stats_storage_size(const StatsBank& bank) {
  const std::size_t d = bank.feature_dim();
  const std::size_t per_class = bank.mode() == CovarianceMode::diagonal ? d + d : d + d * d;
  return per_class * bank.size();
}

namespace {
constexpr std::uint32_t kStatsVersion = 1;
}

std::vector<std::uint8_t> encode_stats(const StatsBank& bank) {
  detail::ByteWriter w;
  w.magic("SLCS");
  w.u32(kStatsVersion);
  w.u8(static_cast<std::uint8_t>(bank.mode()));
  w.u32(static_cast<std::uint32_t>(bank.feature_dim()));
  w.u32(static_cast<std::uint32_t>(bank.size()));
  for (const auto& [id, s] : bank.entries()) {
    w.u32(id);
    w.u64(s.count);
    w.f32_array(s.mean.span());
    if (bank.mode() == CovarianceMode::full) {
      w.f32_array(s.cov.flat());
    } else {
      w.f32_array(s.var.span());
    }
  }
  return w.bytes();
}

StatsBank decode_stats(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "stats bank");
  r.expect_magic("SLCS");
  const std::uint32_t version = r.u32();
  if (version != kStatsVersion) {
    throw BadFormat("stats bank: unsupported version " + std::to_string(version));
  }
  const std::uint8_t mode_flag = r.u8();
  if (mode_flag > 1) throw BadFormat("stats bank: invalid covariance mode flag");
  const auto mode = static_cast<CovarianceMode>(mode_flag);
  const std::uint32_t d = r.u32();
  const std::uint32_t num_classes = r.u32();
  if (d == 0) throw BadFormat("stats bank: zero feature dimension");

  StatsBank bank(d, mode);
  for (std::uint32_t k = 0; k < num_classes; ++k) {
    ClassStats s;
    s.class_id = r.u32();
    s.count = r.u64();
    s.mode = mode;
    s.mean = Vector(d);
    r.f32_array(s.mean.span());
    if (mode == CovarianceMode::full) {
      r.require(4ull * d * d);
      s.cov = Matrix(d, d);
      r.f32_array(s.cov.flat());
    } else {
      s.var = Vector(d);
      r.f32_array(s.var.span());
    }
    if (s.count == 0) throw BadFormat("stats bank: class with zero count");
    if (bank.contains(s.class_id)) throw BadFormat("stats bank: duplicate class record");
    bank.put(std::move(s));
  }
  r.expect_end();
  return bank;
}

void save_stats(const StatsBank& bank, const std::filesystem::path& path) {
  detail::write_file(path, encode_stats(bank));
}

StatsBank load_stats(const std::filesystem::path& path) {
  const auto bytes = detail::read_file(path);
  return decode_stats(bytes);
}

}  // namespace slca
