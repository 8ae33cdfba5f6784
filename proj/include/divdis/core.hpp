#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divdis/error.hpp"

namespace divdis {

/// Absolute tolerance on a probability row sum before it is rejected.
inline constexpr double kRowSumTolerance = 1e-4;

/// Per-sample class probabilities of one model on one split, row-major N x K.
///
/// Only constructible through validate_prediction_set(), so every instance
/// holds finite, non-negative rows that sum to one.
class PredictionSet {
 public:
  PredictionSet() = default;

  const std::string& model_id() const noexcept { return model_id_; }
  const std::string& split_id() const noexcept { return split_id_; }
  std::size_t n_samples() const noexcept { return n_; }
  std::size_t n_classes() const noexcept { return k_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {probs_.data() + i * k_, k_};
  }
  std::span<const double> probs() const noexcept { return probs_; }

  bool has_logits() const noexcept { return !logits_.empty(); }
  std::span<const double> logit_row(std::size_t i) const noexcept {
    return {logits_.data() + i * k_, k_};
  }
  std::span<const double> logits() const noexcept { return logits_; }

 private:
  friend PredictionSet validate_prediction_set(std::string, std::string, std::size_t,
                                               std::size_t, std::span<const double>,
                                               std::optional<std::span<const double>>,
                                               std::optional<std::size_t>);
  std::string model_id_;
  std::string split_id_;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<double> probs_;
  std::vector<double> logits_;
};

/// Validates a raw N x K probability matrix (and optional logits of the same
/// shape) and renormalizes every row to sum exactly to one.
///
/// Rows whose sum is already within 2*K*DBL_EPSILON of one are left untouched,
/// which makes validation idempotent. `expected_k`, when given, is the class
/// count declared by the manifest.
PredictionSet validate_prediction_set(std::string model_id, std::string split_id,
                                      std::size_t n, std::size_t k,
                                      std::span<const double> probs,
                                      std::optional<std::span<const double>> logits = std::nullopt,
                                      std::optional<std::size_t> expected_k = std::nullopt);

struct LabelVector {
  std::string split_id;
  std::vector<std::int32_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
};

/// Throws LabelOutOfRange if any label is outside [0, k).
void validate_labels(const LabelVector& labels, std::size_t k);

std::vector<double> one_hot(std::size_t k, std::size_t y);

struct ModelPair {
  std::string first;
  std::string second;

  friend bool operator==(const ModelPair&, const ModelPair&) = default;
  friend auto operator<=>(const ModelPair&, const ModelPair&) = default;
};

struct Pairing {
  enum class Kind { AllPairs, Anchor };
  Kind kind = Kind::AllPairs;
  std::string anchor;

  static Pairing all_pairs() { return {}; }
  static Pairing anchored(std::string id) { return {Kind::Anchor, std::move(id)}; }

  friend bool operator==(const Pairing&, const Pairing&) = default;
};

struct ModelEntry {
  std::string id;
  std::map<std::string, std::filesystem::path> predictions;  // split -> file
};

struct EnsembleManifest {
  std::size_t k = 0;
  std::string id_split;
  std::vector<std::string> ood_splits;
  std::vector<ModelEntry> models;
  Pairing pairing;
  std::map<std::string, std::filesystem::path> labels;  // split -> file; OOD optional
  std::map<std::string, int> severity;                  // explicit severity overrides
  std::filesystem::path base_dir;                       // relative paths resolve here

  std::vector<std::string> model_ids() const;
  /// ID split first, then OOD splits in manifest order.
  std::vector<std::string> splits() const;
};

/// AllPairs: every unordered pair, lexicographic by model id. Anchor: (anchor, m)
/// for every other model m in the given order.
std::vector<ModelPair> enumerate_pairs(const std::vector<std::string>& model_ids,
                                       const Pairing& pairing);
std::vector<ModelPair> enumerate_pairs(const EnsembleManifest& manifest);

/// Models whose OOD error is estimated: all models (sorted) for AllPairs, the
/// non-anchor models (manifest order) for Anchor pairing.
std::vector<std::string> estimated_models(const EnsembleManifest& manifest);

/// A manifest with every prediction and label file loaded and validated.
struct Ensemble {
  EnsembleManifest manifest;
  std::map<std::string, std::map<std::string, PredictionSet>> predictions;  // model -> split
  std::map<std::string, LabelVector> labels;                                // split -> labels

  const PredictionSet& at(const std::string& model, const std::string& split) const;
  const LabelVector* labels_for(const std::string& split) const;
  std::size_t n_samples(const std::string& split) const;
};

}  // namespace divdis
