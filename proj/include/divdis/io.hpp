#pragma once

// File formats.
//
// DDPM v1 prediction file, all fields little-endian:
//
//   offset  size  field
//   0       4     magic "DDPM"
//   4       2     version (1)
//   6       2     flags (bit 0: logits block present; other bits must be 0)
//   8       4     n (samples)
//   12      4     k (classes)
//   16      4nk   probabilities, float32, row-major
//   ...     4nk   logits, float32, row-major (only if flag bit 0)
//
// Labels: text, one integer per line, optional first line "label".
//
// Manifest: JSON, see README.md for the schema and a worked example.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divdis/core.hpp"

namespace divdis::io {

inline constexpr char kDdpmMagic[4] = {'D', 'D', 'P', 'M'};
inline constexpr std::uint16_t kDdpmVersion = 1;
inline constexpr std::uint16_t kFlagLogits = 0x1;
inline constexpr std::size_t kDdpmHeaderSize = 16;
inline constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 31;

struct DdpmHeader {
  std::uint16_t version = kDdpmVersion;
  std::uint16_t flags = 0;
  std::uint32_t n = 0;
  std::uint32_t k = 0;

  bool has_logits() const noexcept { return (flags & kFlagLogits) != 0; }
};

/// Raw file contents, exactly as stored.
struct DdpmFile {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::vector<float> probs;
  std::vector<float> logits;  // empty when absent

  bool has_logits() const noexcept { return !logits.empty(); }
  friend bool operator==(const DdpmFile&, const DdpmFile&) = default;
};

std::vector<std::uint8_t> encode_ddpm(const DdpmFile& file);
DdpmHeader decode_ddpm_header(std::span<const std::uint8_t> bytes);
DdpmFile decode_ddpm(std::span<const std::uint8_t> bytes);

DdpmHeader read_ddpm_header(const std::filesystem::path& path);
DdpmFile read_ddpm(const std::filesystem::path& path);
void write_ddpm(const DdpmFile& file, const std::filesystem::path& path);

/// Rounds a prediction set to float32 storage.
DdpmFile to_ddpm(const PredictionSet& set);
PredictionSet from_ddpm(const DdpmFile& file, std::string model_id, std::string split_id,
                        std::optional<std::size_t> expected_k = std::nullopt);

PredictionSet read_predictions(const std::filesystem::path& path, std::string model_id,
                               std::string split_id,
                               std::optional<std::size_t> expected_k = std::nullopt);
void write_predictions(const PredictionSet& set, const std::filesystem::path& path);

LabelVector parse_labels(std::string_view text, std::string split_id);
std::string format_labels(const LabelVector& labels);
LabelVector read_labels(const std::filesystem::path& path, std::string split_id);
void write_labels(const LabelVector& labels, const std::filesystem::path& path);

/// CSV with header "p0,...,p{K-1}" and an optional trailing "y" column.
struct CsvPredictions {
  DdpmFile predictions;
  std::optional<LabelVector> labels;
};
CsvPredictions parse_prediction_csv(std::string_view text, std::string split_id);

/// Parses and schema-checks a manifest without touching the referenced files.
/// `source` names the document in error messages.
EnsembleManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                                const std::string& source = "manifest");

/// parse_manifest plus: every referenced file exists, DDPM headers agree with
/// k and with each other on n per split, and the pairing resolves.
EnsembleManifest load_manifest(const std::filesystem::path& path);

std::string format_manifest(const EnsembleManifest& manifest, std::string_view generator = {});

/// Loads and validates every prediction and label file of a manifest.
Ensemble load_ensemble(const EnsembleManifest& manifest);

/// Writes predictions, labels and manifest.json under `dir`, rewriting the
/// manifest's paths to "<model>/<split>.ddpm" and "labels/<split>.csv".
/// Returns the manifest path.
std::filesystem::path write_ensemble(Ensemble& ens, const std::filesystem::path& dir,
                                     std::string_view generator = {});

std::string read_text(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace divdis::io
