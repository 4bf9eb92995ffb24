#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace wpgen {

// splitmix64 step; the standard mixer used to derive independent seeds.
constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds a path of subsystem tags into a root seed. Used so that every
// subsystem (statement order, arrangement, question sampling, infilling)
// gets its own reproducible stream from one root seed.
inline std::uint64_t mix_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = root;
  std::uint64_t out = splitmix64_next(state);
  for (std::uint64_t tag : path) {
    state ^= tag + 0x9e3779b97f4a7c15ULL + (out << 6) + (out >> 2);
    out = splitmix64_next(state);
  }
  return out;
}

// Subsystem stream tags for mix_seed.
namespace seed_stream {
inline constexpr std::uint64_t kStatements = 1;
inline constexpr std::uint64_t kQuestions = 2;
inline constexpr std::uint64_t kArrangement = 3;
inline constexpr std::uint64_t kInfill = 4;
inline constexpr std::uint64_t kInfillRetry = 5;
inline constexpr std::uint64_t kQuestionPool = 6;
inline constexpr std::uint64_t kStub = 7;
}  // namespace seed_stream

// Seeded generator with fully specified bounded draws. mt19937_64 output is
// defined by the standard and the bounded draw below uses plain rejection,
// so sequences are identical on every platform and toolchain.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  // Uniform in [lo, hi], inclusive.
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[below(items.size())];
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wpgen
