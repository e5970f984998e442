#include "graphadv/features.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "graphadv/rng.hpp"

namespace graphadv {

namespace {

constexpr double kEps = 1e-9;

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::bitset<256> char_set(const std::string& s) {
  std::bitset<256> b;
  for (unsigned char c : s) b.set(c);
  return b;
}

std::vector<std::uint16_t> bigram_set(const std::string& s) {
  std::vector<std::uint16_t> out;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    out.push_back(static_cast<std::uint16_t>(static_cast<unsigned char>(s[i]) << 8 | static_cast<unsigned char>(s[i + 1])));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double jaccard(const std::bitset<256>& a, const std::bitset<256>& b) {
  const auto uni = (a | b).count();
  if (uni == 0) return 0.0;
  return 1.0 - static_cast<double>((a & b).count()) / static_cast<double>(uni);
}

double dice(const std::vector<std::uint16_t>& a, const std::vector<std::uint16_t>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else {
      ++common;
      ++i;
      ++j;
    }
  }
  return 1.0 - 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

}  // namespace

std::array<double, kFeatureStats> summary_stats(std::vector<double> v) {
  std::array<double, kFeatureStats> s{};
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / n);
  const double median = quantile_sorted(v, 0.5);
  s = {mean, median, sd, v.front(), v.back(), quantile_sorted(v, 0.25), quantile_sorted(v, 0.75),
       (mean - median) / (sd + kEps), sd / (std::abs(mean) + kEps)};
  return s;
}

std::string strip_tld(const std::string& domain) {
  auto dot = domain.rfind('.');
  if (dot == std::string::npos || dot == 0) return domain;
  return domain.substr(0, dot);
}

double char_entropy(const std::string& s) {
  if (s.empty()) return 0.0;
  std::array<int, 256> count{};
  for (unsigned char c : s) ++count[c];
  double h = 0.0;
  const double n = static_cast<double>(s.size());
  for (int c : count)
    if (c > 0) {
      double p = c / n;
      h -= p * std::log2(p);
    }
  return h;
}

double char_jaccard_distance(const std::string& a, const std::string& b) { return jaccard(char_set(a), char_set(b)); }

double bigram_dice_distance(const std::string& a, const std::string& b) { return dice(bigram_set(a), bigram_set(b)); }

FeatureVector extract_features(const std::vector<std::string>& domains) {
  if (domains.empty()) throw std::invalid_argument("extract_features: empty cluster");
  std::vector<std::string> names;
  names.reserve(domains.size());
  for (const auto& d : domains) names.push_back(strip_tld(d));
  std::sort(names.begin(), names.end());

  std::vector<double> lengths, entropies;
  for (const auto& n : names) {
    lengths.push_back(static_cast<double>(n.size()));
    entropies.push_back(char_entropy(n));
  }

  // Sorting first makes the sample independent of the input order.
  std::vector<std::string> sample = names;
  if (sample.size() > kPairwiseCap) {
    Rng rng(derive_seed(0x5eed, "pairwise-sample"));
    rng.shuffle(sample.begin(), sample.end());
    sample.resize(kPairwiseCap);
  }
  std::vector<std::bitset<256>> sets;
  std::vector<std::vector<std::uint16_t>> grams;
  for (const auto& n : sample) {
    sets.push_back(char_set(n));
    grams.push_back(bigram_set(n));
  }
  std::vector<double> jac, dic;
  for (std::size_t i = 0; i < sample.size(); ++i)
    for (std::size_t j = i + 1; j < sample.size(); ++j) {
      jac.push_back(jaccard(sets[i], sets[j]));
      dic.push_back(dice(grams[i], grams[j]));
    }

  FeatureVector f{};
  const std::array<std::vector<double>*, kFeatureFamilies> fams{&lengths, &entropies, &jac, &dic};
  for (int k = 0; k < kFeatureFamilies; ++k) {
    auto s = summary_stats(*fams[k]);
    std::copy(s.begin(), s.end(), f.begin() + k * kFeatureStats);
  }
  return f;
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const char* fam : {"length", "entropy", "jaccard", "dice"})
      for (const char* stat : {"mean", "median", "std", "min", "max", "p25", "p75", "skew", "cv"})
        out.push_back(std::string(fam) + "_" + stat);
    return out;
  }();
  return names;
}

void write_features_csv_header(std::ostream& out) {
  const auto& n = feature_names();
  for (std::size_t i = 0; i < n.size(); ++i) out << (i ? "," : "") << n[i];
  out << '\n';
}

}  // namespace graphadv
