#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "graphadv/synth.hpp"

namespace graphadv {

// Scenario text format
// --------------------
//   file    := { line }
//   line    := comment | blank | section | pair
//   comment := '#' any-text
//   section := '[family]'            (starts a new planted family)
//   pair    := key '=' value
//
// Top-level keys (before the first section): master_seed, background_hosts,
// background_degree_mean, pool_domains, pool_zipf_exponent,
// private_fraction, benign_groups, group_hosts (min-max), group_domains
// (min-max), group_density.
//
// Family keys: name, charset, length (min-max), tlds (comma list), seed,
// style (random-chars | dictionary-words), infected_hosts, domains,
// sharing (all | subset:<hosts> | fraction:<p>), overlap_background
// (true | false), extra_background_mean.
//
// Unknown keys are errors. Omitted keys keep their defaults.

ScenarioSpec parse_scenario(std::istream& in);
ScenarioSpec read_scenario(const std::filesystem::path& path);

/// Canonical text: every key written, fixed order, shortest round-trip reals.
std::string format_scenario(const ScenarioSpec& spec);

/// Hex digest of the canonical text.
std::string scenario_hash(const ScenarioSpec& spec);

}  // namespace graphadv
