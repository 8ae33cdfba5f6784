#include "divdis/detect.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <exception>
#include <utility>

#include "divdis/lines.hpp"
#include "divdis/numeric.hpp"

namespace divdis {

std::string ScoreKind::name() const {
  switch (kind) {
    case Kind::NegMSP: return "neg-msp";
    case Kind::NegMaxLogit: return "neg-maxlogit";
    case Kind::PairDisagreement: return "pair-" + std::string(to_string(notion));
  }
  return "?";
}

std::optional<ScoreKind> parse_score_kind(const std::string& s) {
  if (s == "neg-msp") return ScoreKind::neg_msp();
  if (s == "neg-maxlogit") return ScoreKind::neg_max_logit();
  if (s.rfind("pair-", 0) == 0) {
    if (const auto n = parse_notion(std::string_view(s).substr(5))) return ScoreKind::pair(*n);
  }
  return std::nullopt;
}

double sample_score(const ScoreKind& kind, std::span<const double> p, std::span<const double> q,
                    std::span<const double> logits, EpsilonPolicy eps) {
  switch (kind.kind) {
    case ScoreKind::Kind::NegMSP:
      if (p.empty()) fail(ErrorCode::MissingRow, "empty probability row");
      return -*std::max_element(p.begin(), p.end());
    case ScoreKind::Kind::NegMaxLogit:
      if (logits.empty()) fail(ErrorCode::MissingLogits, "-MaxLogit needs logits");
      return -*std::max_element(logits.begin(), logits.end());
    case ScoreKind::Kind::PairDisagreement:
      if (q.empty()) fail(ErrorCode::MissingRow, "pair disagreement needs a second model row");
      return disagreement(kind.notion, p, q, eps);
  }
  return 0.0;
}

double roc_auc(std::span<const double> id_scores, std::span<const double> ood_scores) {
  if (id_scores.empty() || ood_scores.empty()) {
    fail(ErrorCode::EmptyScores, "ROC-AUC needs scores on both sides");
  }
  std::vector<std::pair<double, bool>> all;  // (score, is_ood)
  all.reserve(id_scores.size() + ood_scores.size());
  for (double s : id_scores) all.emplace_back(s, false);
  for (double s : ood_scores) all.emplace_back(s, true);
  for (const auto& [s, _] : all) {
    if (std::isnan(s)) fail(ErrorCode::NonFinite, "NaN score");
  }
  std::sort(all.begin(), all.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });

  // 2U = sum over tied groups of 2 * ood_in_group * id_below + ood_in_group * id_in_group
  std::uint64_t twice_u = 0;
  std::uint64_t id_below = 0;
  for (std::size_t g = 0; g < all.size();) {
    std::size_t end = g;
    std::uint64_t ood = 0;
    std::uint64_t id = 0;
    while (end < all.size() && all[end].first == all[g].first) {
      (all[end].second ? ood : id) += 1;
      ++end;
    }
    twice_u += 2 * ood * id_below + ood * id;
    id_below += id;
    g = end;
  }
  const double denom = 2.0 * static_cast<double>(id_scores.size()) *
                       static_cast<double>(ood_scores.size());
  return static_cast<double>(twice_u) / denom;
}

int severity_of(const std::string& split, const std::map<std::string, int>& overrides) {
  if (const auto it = overrides.find(split); it != overrides.end()) return it->second;
  std::size_t start = split.size();
  while (start > 0 && std::isdigit(static_cast<unsigned char>(split[start - 1]))) --start;
  if (start == split.size() || split.size() - start > 9) return 0;
  return std::stoi(split.substr(start));
}

std::vector<double> unit_scores(const Ensemble& ens, const ScoreKind& kind, const ModelPair& unit,
                                const std::string& split, EpsilonPolicy eps) {
  const auto& p = ens.at(unit.first, split);
  const PredictionSet* q = kind.per_pair() ? &ens.at(unit.second, split) : nullptr;
  if (q && q->n_samples() != p.n_samples()) {
    fail(ErrorCode::ShapeMismatch, "pair '" + pair_label(unit) + "' differs in N on " + split);
  }
  if (kind.kind == ScoreKind::Kind::NegMaxLogit && !p.has_logits()) {
    fail(ErrorCode::MissingLogits, "model '" + unit.first + "' has no logits on split '" + split + "'");
  }
  std::vector<double> out(p.n_samples());
  for (std::size_t i = 0; i < p.n_samples(); ++i) {
    out[i] = sample_score(kind, p.row(i), q ? q->row(i) : std::span<const double>{},
                          p.has_logits() ? p.logit_row(i) : std::span<const double>{}, eps);
  }
  return out;
}

DetectionSuite detection_suite(const Ensemble& ens, const std::string& id_split,
                               std::span<const std::string> ood_splits,
                               std::span<const ScoreKind> kinds, const Pairing& pairing,
                               DetectionMode mode, EpsilonPolicy eps) {
  auto models = ens.manifest.model_ids();
  std::sort(models.begin(), models.end());
  const bool any_pair = std::any_of(kinds.begin(), kinds.end(), [](const auto& k) { return k.per_pair(); });
  const auto pairs = any_pair ? enumerate_pairs(models, pairing) : std::vector<ModelPair>{};

  struct Job {
    std::size_t kind;
    std::size_t split;
    std::vector<ModelPair> units;  // all units of a pooled job, one otherwise
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    std::vector<ModelPair> units;
    if (kinds[k].per_pair()) {
      units = pairs;
    } else {
      for (const auto& m : models) units.push_back({m, m});
    }
    for (std::size_t s = 0; s < ood_splits.size(); ++s) {
      if (mode == DetectionMode::Pooled) {
        jobs.push_back({k, s, units});
      } else {
        for (const auto& u : units) jobs.push_back({k, s, {u}});
      }
    }
  }

  auto mean_scores = [&](const ScoreKind& kind, const std::vector<ModelPair>& units,
                         const std::string& split) {
    if (units.size() == 1) return unit_scores(ens, kind, units.front(), split, eps);
    std::vector<KahanSum> acc;
    for (const auto& u : units) {
      const auto s = unit_scores(ens, kind, u, split, eps);
      if (acc.empty()) acc.resize(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) acc[i].add(s[i]);
    }
    std::vector<double> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
      out[i] = acc[i].value() / static_cast<double>(units.size());
    }
    return out;
  };

  std::vector<DetectionResult> rows(jobs.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(jobs.size()); ++j) {
    try {
      const auto& job = jobs[static_cast<std::size_t>(j)];
      const auto& kind = kinds[job.kind];
      const auto& split = ood_splits[job.split];
      const auto id = mean_scores(kind, job.units, id_split);
      const auto ood = mean_scores(kind, job.units, split);
      std::string unit = job.units.size() > 1 || mode == DetectionMode::Pooled
                             ? std::string("pooled")
                             : (kind.per_pair() ? pair_label(job.units.front())
                                                : job.units.front().first);
      rows[static_cast<std::size_t>(j)] = {kind, std::move(unit), id_split, split,
                                           roc_auc(id, ood), id.size(), ood.size()};
    } catch (...) {
#pragma omp critical(divdis_detect_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  DetectionSuite suite;
  suite.rows = std::move(rows);

  // Aggregates in deterministic (kind, split) order.
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    std::map<int, std::pair<KahanSum, std::size_t>> by_severity;
    for (std::size_t s = 0; s < ood_splits.size(); ++s) {
      KahanSum sum;
      std::size_t count = 0;
      for (const auto& r : suite.rows) {
        if (r.kind == kinds[k] && r.ood_split == ood_splits[s]) {
          sum.add(r.auc);
          ++count;
        }
      }
      const int sev = severity_of(ood_splits[s], ens.manifest.severity);
      const double mean = sum.value() / static_cast<double>(count);
      suite.per_split.push_back({kinds[k], ood_splits[s], sev, mean});
      auto& slot = by_severity[sev];
      slot.first.add(mean);
      ++slot.second;
    }
    for (const auto& [sev, acc] : by_severity) {
      suite.per_severity.push_back(
          {kinds[k], sev, acc.first.value() / static_cast<double>(acc.second), acc.second});
    }
  }
  return suite;
}

}  // namespace divdis
