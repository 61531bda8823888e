#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace groupmob {

// 64-bit FNV-1a. Used for output digests and for hashing rng stream tags.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

// Derives an independent generator from (master seed, purpose tag, index).
// Every randomized component draws from its own substream, so results do not
// depend on the order in which components run.
inline std::mt19937_64 substream(std::uint64_t seed, std::string_view tag,
                                 std::uint64_t index = 0) {
  const std::uint64_t t = fnv1a64(tag);
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t),
                    static_cast<std::uint32_t>(t >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// Bounded draw in [0, n). Multiply-shift keeps the result identical across
// toolchains, unlike std::uniform_int_distribution.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  const auto wide = static_cast<unsigned __int128>(rng()) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

inline double uniform_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

// Knuth's product method; fine for the small means used here.
inline int poisson_draw(std::mt19937_64& rng, double mean) {
  if (mean < 0) throw std::invalid_argument("poisson_draw: negative mean");
  if (mean == 0) return 0;
  const double limit = std::exp(-mean);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform_real(rng);
  } while (p > limit);
  return k - 1;
}

template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace groupmob
