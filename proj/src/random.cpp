#include "zerofpr/random.hpp"

namespace zerofpr {

Rng Rng::split() {
  const std::uint64_t child = children_++;
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(child), static_cast<std::uint32_t>(child >> 32),
                    0x9e3779b9u};
  std::uint64_t s = 0;
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  s = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  return Rng(s);
}

Vector Rng::normal_vector(Index n, double stddev) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(0.0, stddev);
  return v;
}

Matrix Rng::normal_matrix(Index rows, Index cols, double stddev) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(0.0, stddev);
  return m;
}

} // namespace zerofpr
