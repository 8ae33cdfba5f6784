#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "divdis/core.hpp"

namespace divdis {

/// Name and version of the random stream used by the generator; recorded in
/// written manifests so worlds can be regenerated elsewhere.
inline constexpr std::string_view kSynthGenerator =
    "mt19937_64/splitmix64-substreams/u53/box-muller v1";

/// Deterministic source of the synthetic worlds: std::mt19937_64 (whose
/// output sequence is fixed by the C++ standard), 53-bit uniforms and
/// Box-Muller normals, so no implementation-defined distribution is involved.
class SynthRng {
 public:
  /// Substream `stream` of `seed`, seeded through splitmix64.
  SynthRng(std::uint64_t seed, std::uint64_t stream);

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  std::size_t below(std::size_t n);  // uniform integer in [0, n)

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct SynthConfig {
  std::size_t n_models = 20;
  std::size_t n_samples = 2000;
  std::size_t n_classes = 10;
  double skill_lo = 2.0;
  double skill_hi = 6.0;
  double temperature_lo = 1.0;
  double temperature_hi = 1.0;
  double id_noise = 1.0;                                 // noise scale of the ID split
  std::vector<double> severities{1.2, 1.5, 1.9, 2.4, 3.0};  // one OOD split each
  std::uint64_t seed = 20240607;

  void validate() const;
};

struct SynthModel {
  std::string id;
  double skill;
  double temperature;
};

struct SynthWorld {
  Ensemble ensemble;  // manifest paths empty until written
  std::vector<SynthModel> models;
};

/// Labels are uniform over K and shared by all splits. For model m with skill
/// s and temperature t, a sample of class y on a split with noise scale
/// sigma gets logits
///   z = kappa * (s * onehot(y) + sigma * g) / sqrt(1 + sigma^2),   g ~ N(0, I)
/// and probabilities softmax(z / t), where kappa = s sqrt(1 + sigma_id^2) / sigma_id^2
/// makes softmax(z) the exact posterior on the ID split (kappa = 1 when sigma_id = 0). At t = 1 a model is
/// calibrated in distribution and overconfident under larger noise. The ID split is "id", the OOD splits are
/// "sev1".."sevS". Noise is drawn from a substream per (model, split).
SynthWorld generate_world(const SynthConfig& cfg);

/// Two-class world in which every ID metric maps to its OOD value exactly
/// through y = 1.7 x + 0.03 (Top1, HD) or y = 1.7 x + 0.03 ln 2 (JSD), for both
/// pairwise disagreement and per-model error. Predictions are one-hot: all
/// models share a block of common mistakes, and model i alone errs on a
/// private block of 10 i (ID) / 17 i + 30 (OOD) samples out of 2000.
SynthWorld generate_planted_world(std::size_t n_models = 6);

inline constexpr double kPlantedSlope = 1.7;
inline constexpr double kPlantedIntercept = 0.03;

}  // namespace divdis
