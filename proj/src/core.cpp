#include "divdis/core.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <set>

namespace divdis {

PredictionSet validate_prediction_set(std::string model_id, std::string split_id,
                                      std::size_t n, std::size_t k,
                                      std::span<const double> probs,
                                      std::optional<std::span<const double>> logits,
                                      std::optional<std::size_t> expected_k) {
  if (n == 0 || k == 0) fail(ErrorCode::ZeroDimension, "prediction set needs n, k >= 1");
  if (expected_k && *expected_k != k) {
    fail(ErrorCode::ClassCountMismatch, model_id + "/" + split_id + ": k=" + std::to_string(k) +
                                            ", manifest says " + std::to_string(*expected_k));
  }
  if (probs.size() != n * k) {
    fail(ErrorCode::ShapeMismatch, "probability buffer size does not match n*k");
  }
  if (logits && logits->size() != n * k) {
    fail(ErrorCode::ShapeMismatch, "logit buffer size does not match n*k");
  }

  PredictionSet out;
  out.model_id_ = std::move(model_id);
  out.split_id_ = std::move(split_id);
  out.n_ = n;
  out.k_ = k;
  out.probs_.assign(probs.begin(), probs.end());

  const double skip_tol = 2.0 * static_cast<double>(k) * DBL_EPSILON;
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.probs_.data() + i * k;
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double v = row[c];
      if (!std::isfinite(v)) {
        fail(ErrorCode::NonFinite, "row " + std::to_string(i) + " has a non-finite entry");
      }
      if (v < 0.0) {
        fail(ErrorCode::NegativeEntry, "row " + std::to_string(i) + " has a negative entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      fail(ErrorCode::RowSumViolation,
           "row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
    if (std::abs(sum - 1.0) > skip_tol) {
      for (std::size_t c = 0; c < k; ++c) row[c] /= sum;
    }
  }

  if (logits) {
    for (double v : *logits) {
      if (!std::isfinite(v)) fail(ErrorCode::NonFinite, "logits contain a non-finite entry");
    }
    out.logits_.assign(logits->begin(), logits->end());
  }
  return out;
}

void validate_labels(const LabelVector& labels, std::size_t k) {
  if (labels.labels.empty()) fail(ErrorCode::EmptyLabels, "split " + labels.split_id);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const auto y = labels.labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= k) {
      fail(ErrorCode::LabelOutOfRange, "split " + labels.split_id + " line " +
                                           std::to_string(i + 1) + ": label " +
                                           std::to_string(y) + " with K=" + std::to_string(k));
    }
  }
}

std::vector<double> one_hot(std::size_t k, std::size_t y) {
  std::vector<double> v(k, 0.0);
  v.at(y) = 1.0;
  return v;
}

std::vector<std::string> EnsembleManifest::model_ids() const {
  std::vector<std::string> ids;
  ids.reserve(models.size());
  for (const auto& m : models) ids.push_back(m.id);
  return ids;
}

std::vector<std::string> EnsembleManifest::splits() const {
  std::vector<std::string> s{id_split};
  s.insert(s.end(), ood_splits.begin(), ood_splits.end());
  return s;
}

std::vector<ModelPair> enumerate_pairs(const std::vector<std::string>& model_ids,
                                       const Pairing& pairing) {
  if (model_ids.size() < 2) {
    fail(ErrorCode::TooFewModels, "pairing needs at least 2 models, got " +
                                      std::to_string(model_ids.size()));
  }
  if (std::set<std::string>(model_ids.begin(), model_ids.end()).size() != model_ids.size()) {
    fail(ErrorCode::DuplicateModel, "model ids must be unique");
  }

  std::vector<ModelPair> pairs;
  if (pairing.kind == Pairing::Kind::AllPairs) {
    std::vector<std::string> sorted = model_ids;
    std::sort(sorted.begin(), sorted.end());
    pairs.reserve(sorted.size() * (sorted.size() - 1) / 2);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      for (std::size_t j = i + 1; j < sorted.size(); ++j) pairs.push_back({sorted[i], sorted[j]});
    }
    return pairs;
  }

  if (std::find(model_ids.begin(), model_ids.end(), pairing.anchor) == model_ids.end()) {
    fail(ErrorCode::AnchorNotFound, "anchor '" + pairing.anchor + "' is not a listed model");
  }
  for (const auto& id : model_ids) {
    if (id != pairing.anchor) pairs.push_back({pairing.anchor, id});
  }
  return pairs;
}

std::vector<ModelPair> enumerate_pairs(const EnsembleManifest& manifest) {
  return enumerate_pairs(manifest.model_ids(), manifest.pairing);
}

std::vector<std::string> estimated_models(const EnsembleManifest& manifest) {
  auto ids = manifest.model_ids();
  if (manifest.pairing.kind == Pairing::Kind::AllPairs) {
    std::sort(ids.begin(), ids.end());
    return ids;
  }
  std::erase(ids, manifest.pairing.anchor);
  return ids;
}

const PredictionSet& Ensemble::at(const std::string& model, const std::string& split) const {
  const auto m = predictions.find(model);
  if (m == predictions.end()) fail(ErrorCode::InvalidArgument, "unknown model '" + model + "'");
  const auto s = m->second.find(split);
  if (s == m->second.end()) {
    fail(ErrorCode::MissingSplit, "model '" + model + "' has no predictions for split '" +
                                      split + "'");
  }
  return s->second;
}

const LabelVector* Ensemble::labels_for(const std::string& split) const {
  const auto it = labels.find(split);
  return it == labels.end() ? nullptr : &it->second;
}

std::size_t Ensemble::n_samples(const std::string& split) const {
  if (manifest.models.empty()) fail(ErrorCode::TooFewModels, "empty ensemble");
  return at(manifest.models.front().id, split).n_samples();
}

}  // namespace divdis
