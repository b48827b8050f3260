#pragma once

#include <cstddef>
#include <cstdint>

namespace slca {

/// Counter-based generator (SplitMix64 output function over a keyed counter).
///
/// The stream is a pure function of (seed, counter), so a generator can be
/// split into independent child streams keyed by an integer without sharing
/// state. Identical seeds produce bit-identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform in (0, 1].
  double uniform_open() noexcept;
  /// Uniform in [0, 1).
  double uniform() noexcept;
  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) noexcept;

  /// Independent child stream; does not advance this generator.
  Rng split(std::uint64_t stream) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace slca
