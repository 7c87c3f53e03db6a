#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "deepesn/core.hpp"

namespace deepesn {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix_seed(base);
  for (auto p : parts) h = mix_seed(h ^ mix_seed(p));
  return h;
}

/// Seeded generator with a platform-independent mapping to reals.
///
/// std::uniform_real_distribution is implementation-defined, so draws are
/// built from the raw 64-bit output instead; identical seeds give identical
/// weights with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [-1, 1).
  double symmetric() { return 2.0 * uniform01() - 1.0; }

  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    // Lemire-style rejection keeps the result unbiased.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % bound;
    }
  }

  std::uint64_t next() { return engine_(); }

  template <typename Scalar>
  Vector<Scalar> symmetric_vector(Index n) {
    Vector<Scalar> v(n);
    for (Index i = 0; i < n; ++i) v[i] = static_cast<Scalar>(symmetric());
    return v;
  }

  template <typename Scalar>
  Matrix<Scalar> symmetric_matrix(Index rows, Index cols) {
    Matrix<Scalar> m(rows, cols);
    // Row-major draw order so the layout of the matrix type does not matter.
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = static_cast<Scalar>(symmetric());
    return m;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace deepesn
