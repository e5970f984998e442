#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

namespace graphadv {

/// Counter-based, splittable pseudo-random generator.
///
/// Output `i` of a stream is a pure function of (key, i), so a stream can be
/// re-created anywhere from its key. `split(tag)` derives an independent child
/// stream; all randomness in the library flows from one master seed through
/// such splits, never through global state.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  [[nodiscard]] Rng split(std::uint64_t tag) const;
  [[nodiscard]] Rng split(std::string_view tag) const;

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform(std::uint64_t n);
  /// Uniform double in [0, 1).
  double uniform01();
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double normal();
  bool bernoulli(double p) { return uniform01() < p; }
  /// Number of failures before the first success, with the given mean.
  std::uint64_t geometric(double mean);

  template <class It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::uint64_t j = uniform(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

  [[nodiscard]] std::uint64_t key() const { return key_; }

 private:
  struct KeyTag {};
  Rng(std::uint64_t key, KeyTag) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);
std::uint64_t hash_string(std::string_view s);
/// Seed for a named sub-task, derived from a parent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace graphadv
