#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace bagbound {

/// Keyed splittable random stream.
///
/// A stream is identified by a root seed plus a path of 64-bit labels, e.g.
/// (replication, resample). The path is folded into a 64-bit key with the
/// SplitMix64 finalizer, and the i-th output is mix(key + (i+1) * gamma), so
/// the sequence depends only on (seed, path) and never on which thread or in
/// which order streams are consumed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});
  RngStream(std::uint64_t seed, const std::vector<std::uint64_t>& path);

  /// Child stream with `label` appended to the path. Does not consume draws.
  RngStream substream(std::uint64_t label) const;
  RngStream substream(std::initializer_list<std::uint64_t> labels) const;

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Unbiased uniform integer on [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal (Marsaglia polar method; the spare variate is cached).
  double normal();

  /// Mixing function used for key derivation (SplitMix64 finalizer).
  static std::uint64_t mix64(std::uint64_t z);

  // UniformRandomBitGenerator surface, e.g. for std::shuffle in tests.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  void derive_key();

  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::uint64_t key_{0};
  std::uint64_t counter_{0};
  double spare_{0.0};
  bool has_spare_{false};
};

}  // namespace bagbound
