/*!
 *  Copyright (c) 2026 by Contributors
 * \file dialtree/random.h
 * \brief Portable seeded randomness. std::mt19937_64 output is fixed by the standard, the
 *  distributions here are too, so seeded results are identical across standard libraries.
 */
#ifndef DIALTREE_RANDOM_H_
#define DIALTREE_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace dialtree {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  /*! \brief Uniform integer in [0, n). n must be > 0. Rejection sampling, no modulo bias. */
  std::uint64_t Below(std::uint64_t n) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /*! \brief Uniform double in [0, 1) with 53 random bits. */
  double Uniform() { return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0); }

  template <typename T>
  void Shuffle(std::vector<T>* v) {
    for (std::size_t i = v->size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap((*v)[i - 1], (*v)[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/*! \brief 64-bit FNV-1a. */
inline std::uint64_t Fnv1a64(std::string_view data, std::uint64_t hash = 14695981039346656037ULL) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

/*! \brief splitmix64 finalizer, used to derive sub-seeds. */
inline std::uint64_t MixSeed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace dialtree

#endif  // DIALTREE_RANDOM_H_
