#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divdis/core.hpp"
#include "divdis/divergence.hpp"

namespace divdis {

/// OOD score; larger means "more OOD" for every kind.
struct ScoreKind {
  enum class Kind { NegMSP, NegMaxLogit, PairDisagreement };
  Kind kind = Kind::NegMSP;
  Notion notion = Notion::Top1;  // PairDisagreement only

  static ScoreKind neg_msp() { return {Kind::NegMSP, Notion::Top1}; }
  static ScoreKind neg_max_logit() { return {Kind::NegMaxLogit, Notion::Top1}; }
  static ScoreKind pair(Notion n) { return {Kind::PairDisagreement, n}; }

  bool per_pair() const noexcept { return kind == Kind::PairDisagreement; }
  /// "neg-msp", "neg-maxlogit", "pair-top1", "pair-hd", ...
  std::string name() const;

  friend bool operator==(const ScoreKind&, const ScoreKind&) = default;
};

std::optional<ScoreKind> parse_score_kind(const std::string& s);

/// NegMSP: -max p. NegMaxLogit: -max logit. PairDisagreement: dis(p, q).
/// `q` / `logits` may be empty when the kind does not need them.
double sample_score(const ScoreKind& kind, std::span<const double> p, std::span<const double> q,
                    std::span<const double> logits, EpsilonPolicy eps = {});

/// ROC-AUC with OOD as the positive class, i.e. the Mann-Whitney statistic
///   sum_{o, i} ([o > i] + 0.5 [o == i]) / (n_ood n_id),
/// from a single sort with tied groups counted in doubled integer units.
double roc_auc(std::span<const double> id_scores, std::span<const double> ood_scores);

/// Trailing integer of the split id ("fog3" -> 3), unless overridden; 0 when
/// neither is available.
int severity_of(const std::string& split, const std::map<std::string, int>& overrides = {});

enum class DetectionMode {
  PerUnit,  // AUC per model / pair, then averaged
  Pooled,   // per-sample score averaged over models / pairs, one AUC
};

struct DetectionResult {
  ScoreKind kind;
  std::string unit;  // model id, "a|b" for a pair, or "pooled"
  std::string id_split;
  std::string ood_split;
  double auc = 0.0;
  std::size_t n_id = 0;
  std::size_t n_ood = 0;
};

struct SplitAggregate {
  ScoreKind kind;
  std::string ood_split;
  int severity = 0;
  double auc = 0.0;  // mean over units
};

struct SeverityAggregate {
  ScoreKind kind;
  int severity = 0;
  double auc = 0.0;  // mean over the OOD splits of this severity
  std::size_t n_splits = 0;
};

struct DetectionSuite {
  std::vector<DetectionResult> rows;
  std::vector<SplitAggregate> per_split;
  std::vector<SeverityAggregate> per_severity;  // ordered by kind, then severity
};

/// Scores of one unit on one split.
std::vector<double> unit_scores(const Ensemble& ens, const ScoreKind& kind, const ModelPair& unit,
                                const std::string& split, EpsilonPolicy eps = {});

DetectionSuite detection_suite(const Ensemble& ens, const std::string& id_split,
                               std::span<const std::string> ood_splits,
                               std::span<const ScoreKind> kinds, const Pairing& pairing,
                               DetectionMode mode = DetectionMode::PerUnit,
                               EpsilonPolicy eps = {});

}  // namespace divdis
