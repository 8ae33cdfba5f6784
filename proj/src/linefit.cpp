#include "divdis/linefit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "divdis/numeric.hpp"

namespace divdis {

std::string_view to_string(TransformKind t) noexcept {
  return t == TransformKind::Probit ? "probit" : "identity";
}

std::optional<TransformKind> parse_transform(std::string_view s) noexcept {
  if (s == "identity") return TransformKind::Identity;
  if (s == "probit") return TransformKind::Probit;
  return std::nullopt;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorCode::InvalidArgument, "normal quantile needs p in (0, 1), got " + std::to_string(p));
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  // Upper half by symmetry: 1 - p is exact there, and refining in the lower
  // tail avoids the cancellation in Phi(x) - p near 1.
  if (p > 0.5) return -normal_quantile(1.0 - p);
  constexpr double p_low = 0.02425;

  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }

  // Halley refinement against the erfc-based CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

TransformKind effective_transform(TransformKind requested, Notion n) noexcept {
  return (requested == TransformKind::Probit && !notion_bounded(n)) ? TransformKind::Identity
                                                                    : requested;
}

double apply_transform(TransformKind t, Notion n, double value, double eps) {
  if (effective_transform(t, n) == TransformKind::Identity) return value;
  const double scaled = std::clamp(value / notion_bound(n), eps, 1.0 - eps);
  return normal_quantile(scaled);
}

double inverse_transform(TransformKind t, Notion n, double value) {
  if (effective_transform(t, n) == TransformKind::Identity) return value;
  return normal_cdf(value) * notion_bound(n);
}

LineFit ols_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    fail(ErrorCode::LengthMismatch, "line fit with " + std::to_string(xs.size()) + " x and " +
                                        std::to_string(ys.size()) + " y values");
  }
  if (xs.size() < 2) fail(ErrorCode::TooFewPoints, "line fit needs at least 2 points");

  const double mx = compensated_mean(xs);
  const double my = compensated_mean(ys);
  KahanSum sxx;
  KahanSum sxy;
  KahanSum syy;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (sxx.value() == 0.0) {
    fail(ErrorCode::DegenerateAbscissa, "all abscissae are identical");
  }

  LineFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  fit.n_points = xs.size();

  KahanSum ss_res;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit(xs[i]);
    ss_res.add(r * r);
  }
  const double ss_tot = syy.value();
  if (ss_tot == 0.0) {
    fit.r2 = ss_res.value() == 0.0 ? 1.0 : 0.0;
  } else {
    fit.r2 = std::clamp(1.0 - ss_res.value() / ss_tot, 0.0, 1.0);
  }
  return fit;
}

LineFit fit_line(Notion n, TransformKind requested, std::span<const double> xs,
                 std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    fail(ErrorCode::LengthMismatch, "line fit with " + std::to_string(xs.size()) + " x and " +
                                        std::to_string(ys.size()) + " y values");
  }
  const TransformKind t = effective_transform(requested, n);
  std::vector<double> tx(xs.size());
  std::vector<double> ty(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    tx[i] = apply_transform(t, n, xs[i]);
    ty[i] = apply_transform(t, n, ys[i]);
  }
  LineFit fit = ols_fit(tx, ty);
  fit.transform = t;
  fit.notion = n;
  fit.transform_downgraded = t != requested;
  return fit;
}

Cubic polyfit3(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(ErrorCode::LengthMismatch, "cubic fit: x/y length mismatch");
  if (xs.size() < 4) fail(ErrorCode::TooFewPoints, "cubic fit needs at least 4 points");

  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd v(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = xs[static_cast<std::size_t>(i)];
    v(i, 0) = 1.0;
    v(i, 1) = x;
    v(i, 2) = x * x;
    v(i, 3) = x * x * x;
    y(i) = ys[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
  qr.setThreshold(1e-10);
  if (qr.rank() < 4) fail(ErrorCode::SingularFit, "Vandermonde matrix is rank deficient");
  const Eigen::VectorXd c = qr.solve(y);

  Cubic out;
  for (int i = 0; i < 4; ++i) out.coef[static_cast<std::size_t>(i)] = c(i);
  return out;
}

}  // namespace divdis
