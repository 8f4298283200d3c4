#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace oadino {

// Seeded generator whose output sequence is fixed by the C++ standard
// (mt19937_64) and whose derived distributions are implemented here rather
// than taken from <random>, so streams are identical across standard
// libraries.
class Rng {
 public:
  // Recorded in reports so other implementations can reproduce sampling.
  static constexpr const char* kAlgorithm =
      "mt19937_64; uniform=(x>>11)*2^-53; bounded=reject x >= n*floor((2^64-1)/n), then x mod n; "
      "normal=Box-Muller (cos branch then sin branch); sample=partial Fisher-Yates from front";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(items.size() - i));
      std::swap(items[i], items[j]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// SplitMix64 finalizer; used to derive independent per-item seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace oadino
