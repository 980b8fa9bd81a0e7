#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "xylreg/dataset.hpp"
#include "xylreg/model.hpp"

namespace xylreg {

inline constexpr int kArchiveVersion = 1;

struct TrainingMetadata {
  std::uint64_t seed = 0;
  /// Model spec as given on the command line, e.g. "mlfn:7".
  std::string model_spec;
  /// Free-form training settings (learning rate, stop reason, ...).
  std::map<std::string, std::string> config;
  /// fingerprint() of the rows the model was fitted on.
  std::string dataset_fingerprint;
  std::size_t trained_rows = 0;
};

struct ModelArchive {
  int version = kArchiveVersion;
  TargetKind target = TargetKind::InitialBoilingPoint;
  Model model;
  TrainingMetadata metadata;
};

/// JSON document:
///   { "format": "xylreg-model", "version": 1, "kind": "linear|grnn|mlfn",
///     "target": "ibp_c|fbp_c", "feature_names": [...],
///     "standardizer": { "means": [9], "stddevs": [9] },
///     "parameters": { kind-specific },
///     "metadata": { "seed", "model_spec", "config", "dataset_fingerprint",
///                   "trained_rows" } }
/// Reals are written in shortest round-trip form, so a reloaded model
/// predicts bit-identically.
std::string serialize(const ModelArchive& archive);

/// Throws BadArchive on malformed input or an unsupported version.
ModelArchive deserialize(std::string_view text);

void save_archive(const std::filesystem::path& path, const ModelArchive& archive);
/// Throws Io when the file cannot be read, BadArchive when it cannot be parsed.
ModelArchive load_archive(const std::filesystem::path& path);

}  // namespace xylreg
