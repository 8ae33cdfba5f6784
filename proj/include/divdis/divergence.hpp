#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divdis/core.hpp"

namespace divdis {

/// The four disagreement notions. Natural logarithms throughout.
enum class Notion { Top1, HD, JSD, KLD };

inline constexpr Notion kAllNotions[] = {Notion::Top1, Notion::HD, Notion::JSD, Notion::KLD};

std::string_view to_string(Notion n) noexcept;
std::optional<Notion> parse_notion(std::string_view s) noexcept;

/// Upper bound of the per-sample value: 1, 1, ln 2, +inf.
double notion_bound(Notion n) noexcept;
bool notion_bounded(Notion n) noexcept;

/// Guard for log(0) in the KL-based notions.
class EpsilonPolicy {
 public:
  static constexpr double kDefault = 1e-12;

  constexpr EpsilonPolicy() = default;
  explicit EpsilonPolicy(double eps);

  constexpr double eps() const noexcept { return eps_; }

 private:
  double eps_ = kDefault;
};

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> p) noexcept;

double dis_top1(std::span<const double> p, std::span<const double> q);

/// (1/sqrt 2) * || sqrt(p) - sqrt(q) ||_2, in [0, 1].
double dis_hellinger(std::span<const double> p, std::span<const double> q);

/// Mean KL of p and q to their midpoint, in [0, ln 2]. 0 log 0 = 0, no clamping.
double dis_jsd(std::span<const double> p, std::span<const double> q);

/// Mean of forward and reverse KL after clamping both arguments entrywise to
/// >= eps and renormalizing. Computed as 1/2 sum (p - q)(ln p - ln q), which is
/// exactly symmetric in floating point.
double dis_kld_sym(std::span<const double> p, std::span<const double> q,
                   EpsilonPolicy eps = {});

double disagreement(Notion n, std::span<const double> p, std::span<const double> q,
                    EpsilonPolicy eps = {});

/// Divergence between the one-hot label y and p, via the closed forms:
///   Top1  1{argmax p != y}
///   HD    (1/sqrt 2) sqrt((sqrt p_y - 1)^2 + sum_{k != y} p_k)
///   JSD   1/2 (ln(2/(1+p_y)) + p_y ln(2 p_y/(1+p_y)) + ln 2 sum_{k != y} p_k)
///   KLD   -ln max(p_y, eps)   (forward KL from the one-hot label, not symmetrized)
double error_pointwise(Notion n, std::span<const double> p, std::size_t y,
                       EpsilonPolicy eps = {});

struct DisagreementRecord {
  ModelPair pair;
  std::string split_id;
  Notion notion = Notion::Top1;
  double value = 0.0;
};

/// Mean per-sample disagreement between two prediction sets of the same split,
/// compensated summation in row order.
DisagreementRecord aggregate_disagreement(Notion n, const PredictionSet& p, const PredictionSet& q,
                                          EpsilonPolicy eps = {});

/// Mean pointwise error against the labels; for Top1 this is 1 - accuracy.
double aggregate_error(Notion n, const PredictionSet& p, const LabelVector& labels,
                       EpsilonPolicy eps = {});

}  // namespace divdis
