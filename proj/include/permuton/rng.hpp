#pragma once

#include <cstdint>
#include <limits>

namespace permuton {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Order-sensitive combination of two 64-bit keys.
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

// Counter-based generator. Draw i of stream (seed, stream) is a pure function
// of (seed, stream, i), so streams can be handed to workers in any order.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();

  // Uniform integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n);

  // Independent generator derived from this one's identity, not its position.
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Uniform (0,1) value keyed by a hash; used for node randomness in trees.
double keyed_uniform(std::uint64_t key);

}  // namespace permuton
