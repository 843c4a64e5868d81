#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentrack/generation.hpp"
#include "sentrack/lattice.hpp"
#include "sentrack/scene_sim.hpp"

namespace sentrack {

/// Flattened "section.key" -> value.
using ConfigMap = std::map<std::string, std::string>;

struct Settings {
  TrackerConfig tracker;
  GenConfig generation;
  NoiseModel noise = NoiseModel::standard();
  std::optional<std::uint64_t> seed;
  int jobs = 0;  // 0: available parallelism
  int folds = 4;
  std::string lexicon;  // empty: built-in
  std::string overlay;  // overlay directory; empty: no overlays
};

/// INI file; sections constants, tracker, generation, noise, run.
ConfigMap read_config_file(const std::filesystem::path& path);
/// Parses "section.key=value".
std::pair<std::string, std::string> parse_assignment(const std::string& text);

/// Applies entries in key order. Unknown keys and malformed values throw
/// ValidationError naming the key. Validates the result.
void apply_config(Settings& s, const ConfigMap& entries);

/// Every recognized key, sorted.
std::vector<std::string> config_keys();

}  // namespace sentrack
