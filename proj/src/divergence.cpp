#include "divdis/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "divdis/numeric.hpp"

namespace divdis {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_same_length(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    fail(ErrorCode::LengthMismatch, "distributions of length " + std::to_string(p.size()) +
                                        " and " + std::to_string(q.size()));
  }
}

void check_label(std::span<const double> p, std::size_t y) {
  if (y >= p.size()) {
    fail(ErrorCode::LabelOutOfRange,
         "label " + std::to_string(y) + " with K=" + std::to_string(p.size()));
  }
}

}  // namespace

std::string_view to_string(Notion n) noexcept {
  switch (n) {
    case Notion::Top1: return "top1";
    case Notion::HD: return "hd";
    case Notion::JSD: return "jsd";
    case Notion::KLD: return "kld";
  }
  return "?";
}

std::optional<Notion> parse_notion(std::string_view s) noexcept {
  for (Notion n : kAllNotions) {
    if (s == to_string(n)) return n;
  }
  return std::nullopt;
}

double notion_bound(Notion n) noexcept {
  switch (n) {
    case Notion::Top1:
    case Notion::HD: return 1.0;
    case Notion::JSD: return std::numbers::ln2;
    case Notion::KLD: return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

bool notion_bounded(Notion n) noexcept { return n != Notion::KLD; }

EpsilonPolicy::EpsilonPolicy(double eps) : eps_(eps) {
  if (!(eps > 0.0 && eps < 1e-3)) {
    fail(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1e-3), got " + std::to_string(eps));
  }
}

std::size_t argmax(std::span<const double> p) noexcept {
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  return best;
}

double dis_top1(std::span<const double> p, std::span<const double> q) {
  check_same_length(p, q);
  return argmax(p) != argmax(q) ? 1.0 : 0.0;
}

double dis_hellinger(std::span<const double> p, std::span<const double> q) {
  check_same_length(p, q);
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = std::sqrt(p[k]) - std::sqrt(q[k]);
    s += d * d;
  }
  return std::min(1.0, kInvSqrt2 * std::sqrt(s));
}

double dis_jsd(std::span<const double> p, std::span<const double> q) {
  check_same_length(p, q);
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double m = 0.5 * (p[k] + q[k]);
    const double a = p[k] > 0.0 ? p[k] * std::log(p[k] / m) : 0.0;
    const double b = q[k] > 0.0 ? q[k] * std::log(q[k] / m) : 0.0;
    s += a + b;
  }
  return std::clamp(0.5 * s, 0.0, std::numbers::ln2);
}

double dis_kld_sym(std::span<const double> p, std::span<const double> q, EpsilonPolicy eps) {
  check_same_length(p, q);
  const double e = eps.eps();
  double sp = 0.0;
  double sq = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    sp += std::max(p[k], e);
    sq += std::max(q[k], e);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double a = std::max(p[k], e) / sp;
    const double b = std::max(q[k], e) / sq;
    s += (a - b) * (std::log(a) - std::log(b));
  }
  return std::max(0.0, 0.5 * s);
}

double disagreement(Notion n, std::span<const double> p, std::span<const double> q,
                    EpsilonPolicy eps) {
  switch (n) {
    case Notion::Top1: return dis_top1(p, q);
    case Notion::HD: return dis_hellinger(p, q);
    case Notion::JSD: return dis_jsd(p, q);
    case Notion::KLD: return dis_kld_sym(p, q, eps);
  }
  return 0.0;
}

double error_pointwise(Notion n, std::span<const double> p, std::size_t y, EpsilonPolicy eps) {
  check_label(p, y);
  const double py = p[y];
  switch (n) {
    case Notion::Top1:
      return argmax(p) != y ? 1.0 : 0.0;
    case Notion::HD: {
      double rest = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (k != y) rest += p[k];
      }
      const double d = std::sqrt(py) - 1.0;
      return std::min(1.0, kInvSqrt2 * std::sqrt(d * d + rest));
    }
    case Notion::JSD: {
      double rest = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (k != y) rest += p[k];
      }
      const double own = py > 0.0 ? py * std::log(2.0 * py / (1.0 + py)) : 0.0;
      const double v = 0.5 * (std::log(2.0 / (1.0 + py)) + own + rest * std::numbers::ln2);
      return std::clamp(v, 0.0, std::numbers::ln2);
    }
    case Notion::KLD:
      return -std::log(std::max(py, eps.eps()));
  }
  return 0.0;
}

DisagreementRecord aggregate_disagreement(Notion n, const PredictionSet& p, const PredictionSet& q,
                                          EpsilonPolicy eps) {
  if (p.split_id() != q.split_id()) {
    fail(ErrorCode::ShapeMismatch,
         "cannot compare split '" + p.split_id() + "' with split '" + q.split_id() + "'");
  }
  if (p.n_samples() != q.n_samples() || p.n_classes() != q.n_classes()) {
    fail(ErrorCode::ShapeMismatch, "models '" + p.model_id() + "' and '" + q.model_id() +
                                       "' disagree on shape for split '" + p.split_id() + "'");
  }
  KahanSum sum;
  for (std::size_t i = 0; i < p.n_samples(); ++i) sum.add(disagreement(n, p.row(i), q.row(i), eps));
  return {{p.model_id(), q.model_id()},
          p.split_id(),
          n,
          sum.value() / static_cast<double>(p.n_samples())};
}

double aggregate_error(Notion n, const PredictionSet& p, const LabelVector& labels,
                       EpsilonPolicy eps) {
  if (labels.size() != p.n_samples()) {
    fail(ErrorCode::LengthMismatch, "split '" + p.split_id() + "': " +
                                        std::to_string(labels.size()) + " labels for " +
                                        std::to_string(p.n_samples()) + " predictions");
  }
  KahanSum sum;
  for (std::size_t i = 0; i < p.n_samples(); ++i) {
    const auto y = labels.labels[i];
    if (y < 0) fail(ErrorCode::LabelOutOfRange, "negative label");
    sum.add(error_pointwise(n, p.row(i), static_cast<std::size_t>(y), eps));
  }
  return sum.value() / static_cast<double>(p.n_samples());
}

}  // namespace divdis
