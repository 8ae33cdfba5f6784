#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "divdis/divergence.hpp"

namespace divdis {

enum class TransformKind { Identity, Probit };

inline constexpr double kProbitEpsilon = 1e-4;

std::string_view to_string(TransformKind t) noexcept;
std::optional<TransformKind> parse_transform(std::string_view s) noexcept;

/// Standard normal CDF and its inverse (Acklam's rational approximation
/// followed by one Halley step; ~1e-15 relative accuracy).
double normal_cdf(double x) noexcept;
double normal_quantile(double p);

/// Probit has no meaning for an unbounded notion; such requests fall back to
/// Identity.
TransformKind effective_transform(TransformKind requested, Notion n) noexcept;

/// Identity: value. Probit: quantile(clamp(value / bound(n), eps, 1 - eps)).
double apply_transform(TransformKind t, Notion n, double value, double eps = kProbitEpsilon);
double inverse_transform(TransformKind t, Notion n, double value);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n_points = 0;
  TransformKind transform = TransformKind::Identity;
  std::optional<Notion> notion;
  bool transform_downgraded = false;  // Probit requested for KLD

  double operator()(double x) const noexcept { return slope * x + intercept; }
};

/// Least-squares line y = a x + b with R^2 = 1 - SS_res / SS_tot. When SS_tot
/// is zero, R^2 is 1 for an exact fit and 0 otherwise.
LineFit ols_fit(std::span<const double> xs, std::span<const double> ys);

/// Transforms both axes with the (effective) transform of the notion, then fits.
LineFit fit_line(Notion n, TransformKind requested, std::span<const double> xs,
                 std::span<const double> ys);

struct Cubic {
  std::array<double, 4> coef{};  // c0 + c1 x + c2 x^2 + c3 x^3

  double operator()(double x) const noexcept {
    return ((coef[3] * x + coef[2]) * x + coef[1]) * x + coef[0];
  }
};

/// Least-squares cubic through column-pivoted QR of the Vandermonde matrix.
Cubic polyfit3(std::span<const double> xs, std::span<const double> ys);

}  // namespace divdis
