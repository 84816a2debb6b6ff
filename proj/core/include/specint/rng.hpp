#pragma once

#include <cstdint>
#include <vector>

namespace specint {

/// Seedable pseudo-random generator with bit-identical streams on every
/// platform (xoshiro256** scrambled output, state expanded from the seed
/// with splitmix64). The standard <random> distributions are not pinned by
/// the C++ standard, so all draws below are implemented here.
///
/// Independent streams: derive(seed, stream_id) gives a generator whose
/// output is decorrelated from every other stream id under the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }

  static Rng derive(std::uint64_t seed, std::uint64_t stream_id);

  void reseed(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform double in [lo, hi). Mantissa-width draw: (u >> 11) * 2^-53.
  double uniform(double lo = 0.0, double hi = 1.0);

  /// Uniform integer in [0, n). n must be > 0. Rejection-free
  /// multiply-shift reduction (Lemire), deterministic.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal via Box-Muller; the second deviate of each pair is
  /// cached, so draws come in a fixed deterministic order.
  double normal(double mean = 0.0, double stddev = 1.0);

  /// Fisher-Yates in-place shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.empty()) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i + 1));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stream ids used across the project so that no two purposes ever share a
/// generator state (split plans, model init, MC sampling, ... ).
namespace stream {
inline constexpr std::uint64_t kSplit = 1;
inline constexpr std::uint64_t kModelInit = 2;
inline constexpr std::uint64_t kMcTrain = 3;
inline constexpr std::uint64_t kMcEval = 4;
inline constexpr std::uint64_t kShuffle = 5;
inline constexpr std::uint64_t kSynth = 6;
inline constexpr std::uint64_t kGa = 7;
inline constexpr std::uint64_t kSvm = 8;
inline constexpr std::uint64_t kTest = 99;
}  // namespace stream

}  // namespace specint
