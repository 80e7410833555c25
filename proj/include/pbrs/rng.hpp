#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pbrs {

// Unbiased draw in [0, n), multiply-shift with rejection. Avoids the
// distribution classes so streams are identical across standard libraries.
inline std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) return 0;
  unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
  std::uint64_t low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    while (low < threshold) {
      m = static_cast<unsigned __int128>(rng()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Fisher-Yates on the first `take` slots; the prefix is the sample.
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t take, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < take && i + 1 < items.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded_draw(rng, items.size() - i));
    std::swap(items[i], items[j]);
  }
}

}  // namespace pbrs
