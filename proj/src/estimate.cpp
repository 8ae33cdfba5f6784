#include "divdis/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "divdis/kernels.hpp"
#include "divdis/lines.hpp"
#include "divdis/numeric.hpp"

namespace divdis {

namespace {

Notion fit_notion(const LineFit& fit) {
  if (!fit.notion) fail(ErrorCode::InvalidArgument, "line fit carries no notion");
  return *fit.notion;
}

void check_transform(const LineFit& fit, TransformKind errors_transform) {
  const Notion n = fit_notion(fit);
  if (effective_transform(errors_transform, n) != fit.transform) {
    fail(ErrorCode::TransformMismatch,
         "fit uses " + std::string(to_string(fit.transform)) + ", errors use " +
             std::string(to_string(effective_transform(errors_transform, n))));
  }
}

// Maps a transformed value back and clamps it to the notion's range.
void finish(Notion n, TransformKind t, double v, Estimates& out) {
  const double raw = inverse_transform(t, n, v);
  const double hi = notion_bound(n);
  const double clamped = std::clamp(raw, 0.0, hi);
  if (!std::isfinite(clamped)) fail(ErrorCode::SingularFit, "non-finite estimate");
  out.values.push_back(clamped);
  out.clamped.push_back(clamped != raw);
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  return m == Method::ALineD ? "aline-d" : "aline-s";
}

std::optional<Method> parse_method(std::string_view s) noexcept {
  if (s == "aline-s") return Method::ALineS;
  if (s == "aline-d") return Method::ALineD;
  return std::nullopt;
}

void EstimationConfig::validate() const {
  if (!(r2_gate > 0.0 && r2_gate <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "r2 gate must lie in (0, 1], got " + std::to_string(r2_gate));
  }
  if (!(anchor_weight > 0.0) || !std::isfinite(anchor_weight)) {
    fail(ErrorCode::InvalidArgument, "anchor weight must be positive");
  }
}

Method default_method(const Pairing& pairing) noexcept {
  return pairing.kind == Pairing::Kind::Anchor ? Method::ALineS : Method::ALineD;
}

Estimates aline_s(const LineFit& fit, std::span<const double> id_errors,
                  TransformKind errors_transform) {
  check_transform(fit, errors_transform);
  const Notion n = fit_notion(fit);
  Estimates out;
  out.values.reserve(id_errors.size());
  for (double e : id_errors) finish(n, fit.transform, fit(apply_transform(fit.transform, n, e)), out);
  return out;
}

Estimates aline_d(const LineFit& fit, std::span<const double> id_errors,
                  std::span<const PairObservation> ood_disagreements, double anchor_weight,
                  TransformKind errors_transform) {
  check_transform(fit, errors_transform);
  const Notion n = fit_notion(fit);
  if (!(anchor_weight >= 0.0) || !std::isfinite(anchor_weight)) {
    fail(ErrorCode::InvalidArgument, "anchor weight must be finite and non-negative");
  }
  const std::size_t m = id_errors.size();
  if (m == 0) fail(ErrorCode::TooFewModels, "ALine-D with no models");

  std::vector<bool> covered(m, false);
  for (const auto& o : ood_disagreements) {
    if (o.i >= m || o.j >= m || o.i == o.j) fail(ErrorCode::InvalidArgument, "bad pair index");
    covered[o.i] = covered[o.j] = true;
  }
  if (anchor_weight == 0.0 && std::find(covered.begin(), covered.end(), false) != covered.end()) {
    fail(ErrorCode::Underdetermined, "a model appears in no pair and the anchor weight is 0");
  }

  const auto rows = static_cast<Eigen::Index>(ood_disagreements.size() + (anchor_weight > 0 ? m : 0));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(m));
  Eigen::VectorXd rhs(rows);
  Eigen::Index r = 0;
  for (const auto& o : ood_disagreements) {
    a(r, static_cast<Eigen::Index>(o.i)) = 0.5;
    a(r, static_cast<Eigen::Index>(o.j)) = 0.5;
    rhs(r) = apply_transform(fit.transform, n, o.value);
    ++r;
  }
  if (anchor_weight > 0.0) {
    const double sw = std::sqrt(anchor_weight);
    for (std::size_t i = 0; i < m; ++i, ++r) {
      a(r, static_cast<Eigen::Index>(i)) = sw;
      rhs(r) = sw * fit(apply_transform(fit.transform, n, id_errors[i]));
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-12);
  if (qr.rank() < static_cast<Eigen::Index>(m)) {
    fail(ErrorCode::SingularFit, "ALine-D system is rank deficient");
  }
  const Eigen::VectorXd v = qr.solve(rhs);

  Estimates out;
  out.values.reserve(m);
  for (std::size_t i = 0; i < m; ++i) finish(n, fit.transform, v(static_cast<Eigen::Index>(i)), out);
  return out;
}

double mape(std::span<const double> estimates, std::span<const double> truths) {
  if (estimates.size() != truths.size()) {
    fail(ErrorCode::LengthMismatch, "MAPE over " + std::to_string(estimates.size()) +
                                        " estimates and " + std::to_string(truths.size()) +
                                        " truths");
  }
  if (truths.empty()) fail(ErrorCode::LengthMismatch, "MAPE of nothing");
  KahanSum s;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (!(truths[i] > 0.0)) fail(ErrorCode::ZeroTruth, "true error must be positive for MAPE");
    s.add(std::abs(estimates[i] - truths[i]) / truths[i]);
  }
  return 100.0 * s.value() / static_cast<double>(truths.size());
}

std::vector<std::string> gate_by_r2(const SplitFits& fits, double r2_gate,
                                    std::span<const Notion> notions) {
  std::vector<std::string> admitted;
  for (const auto& [split, by_notion] : fits) {
    double min_r2 = std::numeric_limits<double>::infinity();
    for (Notion n : notions) {
      const auto it = by_notion.find(n);
      if (it == by_notion.end()) {
        fail(ErrorCode::MissingNotionFit,
             "split '" + split + "' has no " + std::string(to_string(n)) + " fit");
      }
      min_r2 = std::min(min_r2, it->second.r2);
    }
    if (r2_gate <= 0.0 || min_r2 > r2_gate) admitted.push_back(split);
  }
  return admitted;
}

EstimationReport estimate_split(const Ensemble& ens, const std::string& ood_split,
                                const EstimationConfig& cfg, EpsilonPolicy eps) {
  cfg.validate();
  const auto& manifest = ens.manifest;
  const auto line = agreement_line(ens, ood_split, cfg.notion, cfg.transform, eps);

  EstimationReport rep;
  rep.split = ood_split;
  rep.notion = cfg.notion;
  rep.method = cfg.method;
  rep.fit = line.fit;
  rep.admitted = line.fit.r2 > cfg.r2_gate;

  const auto targets = estimated_models(manifest);
  Estimates est;
  if (cfg.method == Method::ALineS) {
    const auto id_err = model_errors(ens, targets, manifest.id_split, cfg.notion, eps);
    est = aline_s(line.fit, id_err, cfg.transform);
  } else {
    // Unknowns cover every model that appears in a pair, the anchor included.
    auto all = manifest.model_ids();
    std::sort(all.begin(), all.end());
    const auto id_err = model_errors(ens, all, manifest.id_split, cfg.notion, eps);
    const auto pairs = enumerate_pairs(manifest);
    auto index_of = [&](const std::string& id) {
      return static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), id) - all.begin());
    };
    std::vector<PairObservation> obs;
    obs.reserve(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      obs.push_back({index_of(pairs[p].first), index_of(pairs[p].second), line.ood[p]});
    }
    const auto full = aline_d(line.fit, id_err, obs, cfg.anchor_weight, cfg.transform);
    for (const auto& t : targets) {
      const auto i = index_of(t);
      est.values.push_back(full.values[i]);
      est.clamped.push_back(full.clamped[i]);
    }
  }

  std::optional<std::vector<double>> truths;
  if (ens.labels_for(ood_split) != nullptr) {
    truths = model_errors(ens, targets, ood_split, cfg.notion, eps);
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    ModelEstimate me{targets[i], est.values[i], std::nullopt, est.clamped[i]};
    if (truths) me.truth = (*truths)[i];
    rep.models.push_back(std::move(me));
  }
  if (truths) rep.mape = mape(est.values, *truths);
  return rep;
}

}  // namespace divdis
