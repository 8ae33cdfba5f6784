#include "divdis/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "divdis/numeric.hpp"

namespace divdis {

double cace(const PredictionSet& p, const LabelVector& labels, const CalibrationConfig& cfg) {
  if (cfg.n_bins < 2) fail(ErrorCode::InvalidArgument, "CACE needs at least 2 bins");
  if (labels.size() != p.n_samples()) {
    fail(ErrorCode::LengthMismatch, "split '" + p.split_id() + "': " +
                                        std::to_string(labels.size()) + " labels for " +
                                        std::to_string(p.n_samples()) + " predictions");
  }
  validate_labels(labels, p.n_classes());

  const std::size_t k = p.n_classes();
  const std::size_t bins = cfg.n_bins;
  // Per (class, bin): summed confidence and count of samples with y == class.
  std::vector<KahanSum> conf(k * bins);
  std::vector<std::size_t> hits(k * bins, 0);

  for (std::size_t i = 0; i < p.n_samples(); ++i) {
    const auto row = p.row(i);
    const auto y = static_cast<std::size_t>(labels.labels[i]);
    for (std::size_t c = 0; c < k; ++c) {
      const auto b = std::min(bins - 1, static_cast<std::size_t>(row[c] * static_cast<double>(bins)));
      conf[c * bins + b].add(row[c]);
      if (c == y) ++hits[c * bins + b];
    }
  }

  // n_kb/N * |sum_conf/n_kb - hits/n_kb| == |sum_conf - hits| / N
  KahanSum total;
  for (std::size_t cell = 0; cell < k * bins; ++cell) {
    total.add(std::abs(conf[cell].value() - static_cast<double>(hits[cell])));
  }
  return total.value() / static_cast<double>(p.n_samples());
}

double ensemble_cace(std::span<const PredictionSet* const> models, const LabelVector& labels,
                     const CalibrationConfig& cfg) {
  if (models.empty()) fail(ErrorCode::TooFewModels, "ensemble CACE of an empty ensemble");
  KahanSum s;
  for (const auto* m : models) s.add(cace(*m, labels, cfg));
  return s.value() / static_cast<double>(models.size());
}

}  // namespace divdis
