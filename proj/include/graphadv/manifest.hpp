#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphadv/defense.hpp"
#include "graphadv/pipeline.hpp"
#include "graphadv/synth.hpp"

namespace graphadv {

inline constexpr const char* kToolVersion = "0.3.0";

enum class RunCommand { generate, cluster, attack, sweep };

std::string_view to_string(RunCommand c);
RunCommand run_command_from_string(std::string_view s);

struct SweepSpec {
  SweepParam param = SweepParam::svd_rank;
  std::vector<int> values;
  GridSpec grid;
};

/// Everything a run depends on. Executing the same manifest twice writes
/// byte-identical artifacts.
struct RunManifest {
  static constexpr int kVersion = 1;

  std::string tool_version = kToolVersion;
  RunCommand command = RunCommand::cluster;
  /// Canonical scenario text; empty when clustering an input edge list.
  std::string scenario;
  std::string scenario_hash;
  /// Input edge list for `cluster` and its content digest.
  std::string input_edges;
  std::string input_hash;
  DetectionConfig detection;
  std::uint64_t model_seed = 7;
  std::uint64_t attack_seed = 0;
  std::optional<AttackSpec> attack;
  std::optional<SweepSpec> sweep;
  /// Written files, relative to the run directory.
  std::vector<std::string> artifacts;

  /// Digest of everything but the artifact list; names the run directory.
  [[nodiscard]] std::string hash() const;
  [[nodiscard]] std::string to_json() const;
  static RunManifest from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static RunManifest load(const std::filesystem::path& path);
};

/// Hex digest of a file's bytes.
std::string file_hash(const std::filesystem::path& path);

/// `out / manifest.hash()`.
std::filesystem::path run_directory(const std::filesystem::path& out, const RunManifest& m);

/// Runs the manifest, writing artifacts and manifest.json into `dir`.
/// Returns the manifest with its artifact list filled in.
RunManifest execute(RunManifest m, const std::filesystem::path& dir);

struct ReplayResult {
  bool identical = true;
  std::vector<std::string> mismatched;  // artifacts whose bytes differ or are missing
};

/// Re-executes the manifest stored in `run_dir` into `scratch_dir` and
/// compares every artifact byte for byte.
ReplayResult replay(const std::filesystem::path& run_dir, const std::filesystem::path& scratch_dir);

}  // namespace graphadv
