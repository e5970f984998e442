#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace graphadv {

inline constexpr int kFeatureStats = 9;
inline constexpr int kFeatureFamilies = 4;
inline constexpr int kNumFeatures = kFeatureStats * kFeatureFamilies;
/// Pairwise statistics use at most this many domains per cluster.
inline constexpr std::size_t kPairwiseCap = 200;

using FeatureVector = std::array<double, kNumFeatures>;

/// Summary statistics in feature order: mean, median, std, min, max, p25,
/// p75, (mean − median)/(std + ε), std/(|mean| + ε).
std::array<double, kFeatureStats> summary_stats(std::vector<double> values);

/// The name without its top-level label; single-label names are kept.
std::string strip_tld(const std::string& domain);

/// Shannon entropy in bits of the character distribution of s.
double char_entropy(const std::string& s);
/// 1 − |A∩B|/|A∪B| over character sets.
double char_jaccard_distance(const std::string& a, const std::string& b);
/// 1 − 2|A∩B|/(|A|+|B|) over bigram sets.
double bigram_dice_distance(const std::string& a, const std::string& b);

/// Length, entropy, pairwise character Jaccard and pairwise bigram Dice
/// statistics of a cluster's domains. Throws on an empty cluster.
FeatureVector extract_features(const std::vector<std::string>& domains);

/// Column names, e.g. "length_mean", "dice_cv".
const std::vector<std::string>& feature_names();
void write_features_csv_header(std::ostream& out);

}  // namespace graphadv
