#pragma once

#include "zerofpr/types.hpp"

#include <cstdint>
#include <random>

namespace zerofpr {

/// Seeded generator with a draw counter and deterministic splitting: the
/// i-th child of a generator seeded with s depends only on (s, i), never on
/// how many numbers the parent has produced.
class Rng {
public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() {
    ++draws_;
    return engine_();
  }

  Rng split();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(*this);
  }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(*this);
  }
  Index uniform_index(Index n) {
    return std::uniform_int_distribution<Index>(0, n - 1)(*this);
  }
  Vector normal_vector(Index n, double stddev = 1.0);
  Matrix normal_matrix(Index rows, Index cols, double stddev = 1.0);

private:
  std::uint64_t seed_;
  std::uint64_t children_ = 0;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

} // namespace zerofpr
