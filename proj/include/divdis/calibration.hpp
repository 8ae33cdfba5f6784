#pragma once

#include <cstddef>
#include <span>

#include "divdis/core.hpp"

namespace divdis {

struct CalibrationConfig {
  std::size_t n_bins = 15;  // equal-width bins over [0, 1], last bin closed
};

/// Class-aggregated calibration error:
///   sum_k sum_b (n_kb / N) |mean p_k in bin b - freq(y = k) in bin b|
/// Normalized by N, not N*K, so the value lies in [0, K].
double cace(const PredictionSet& p, const LabelVector& labels, const CalibrationConfig& cfg = {});

/// Mean of per-model CACE.
double ensemble_cace(std::span<const PredictionSet* const> models, const LabelVector& labels,
                     const CalibrationConfig& cfg = {});

}  // namespace divdis
