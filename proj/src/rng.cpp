#include "graphadv/rng.hpp"

#include <cmath>
#include <numbers>

namespace graphadv {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_string(std::string_view s) {
  // FNV-1a, then finalized.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return mix64(h);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  return mix64(mix64(seed) ^ hash_string(tag));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(mix64(seed) ^ mix64(tag + kGolden));
}

Rng::Rng(std::uint64_t seed) : key_(mix64(seed + kGolden)) {}

Rng::result_type Rng::operator()() {
  ++counter_;
  return mix64(key_ + kGolden * counter_);
}

Rng Rng::split(std::uint64_t tag) const {
  return Rng(mix64(key_ ^ mix64(tag * kGolden + 0x632BE59BD9B4E019ULL)), KeyTag{});
}

Rng Rng::split(std::string_view tag) const {
  return Rng(mix64(key_ ^ hash_string(tag)), KeyTag{});
}

std::uint64_t Rng::uniform(std::uint64_t n) {
  // Lemire's nearly-divisionless bounded integer.
  __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<__uint128_t>((*this)()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::uniform01() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform01();
  double u2 = uniform01();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::geometric(double mean) {
  if (mean <= 0.0) return 0;
  double p = 1.0 / (1.0 + mean);
  double u = uniform01();
  return static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

}  // namespace graphadv
