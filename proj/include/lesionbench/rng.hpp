#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace lesionbench {

// FNV-1a, used to give every (image id, variant) pair its own draw index
// independent of directory listing order.
inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

// Finalizer of the splitmix64 generator. Used on its own to derive
// independent streams from (seed, index) pairs.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// splitmix64: state advances by the golden-gamma constant, output is the
// mixed state. Chosen over std::mt19937_64 + std::uniform_* because every
// derived draw below is pinned to exact integer arithmetic, so split files
// and augmentation specs reproduce bit-identically on any platform.
//
//   state += 0x9e3779b97f4a7c15
//   z = state; z ^= z >> 30; z *= 0xbf58476d1ce4e5b9
//   z ^= z >> 27; z *= 0x94d049bb133111eb; z ^= z >> 31
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool next_bool() { return (next() >> 63) != 0; }

  // Uniform integer in [0, n) via 128-bit multiply-shift.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Fisher-Yates shuffle driven by SplitMix64.
template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace lesionbench
