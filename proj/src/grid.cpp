#include "divdis/grid.hpp"

#include <string>

namespace divdis {

namespace {

void check_resolution(std::size_t r) {
  if (r < 2) fail(ErrorCode::InvalidArgument, "grid resolution must be >= 2, got " + std::to_string(r));
}

}  // namespace

std::vector<SimplexPoint> simplex_grid(Notion n, const GridMode& mode, std::size_t resolution,
                                       EpsilonPolicy eps) {
  check_resolution(resolution);
  if (const auto* e = std::get_if<ErrorForClass>(&mode); e && e->label >= 3) {
    fail(ErrorCode::LabelOutOfRange, "simplex grid is 3-class; label " + std::to_string(e->label));
  }
  const double r = static_cast<double>(resolution);
  std::vector<SimplexPoint> out;
  out.reserve((resolution + 1) * (resolution + 2) / 2);
  for (std::size_t i = 0; i <= resolution; ++i) {
    for (std::size_t j = 0; i + j <= resolution; ++j) {
      // Each coordinate is its own quotient so grid points hit the anchor exactly.
      const std::array<double, 3> p{static_cast<double>(i) / r, static_cast<double>(j) / r,
                                    static_cast<double>(resolution - i - j) / r};
      double value = 0.0;
      if (const auto* a = std::get_if<AgainstAnchor>(&mode)) {
        value = disagreement(n, p, a->anchor, eps);
      } else {
        value = error_pointwise(n, p, std::get<ErrorForClass>(mode).label, eps);
      }
      out.push_back({p[0], p[1], value});
    }
  }
  return out;
}

std::vector<CurvePoint> binary_error_curve(Notion n, std::size_t resolution, EpsilonPolicy eps) {
  check_resolution(resolution);
  std::vector<CurvePoint> out;
  out.reserve(resolution + 1);
  for (std::size_t i = 0; i <= resolution; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(resolution);
    const std::array<double, 2> p{t, static_cast<double>(resolution - i) / static_cast<double>(resolution)};
    out.push_back({t, error_pointwise(n, p, 0, eps)});
  }
  return out;
}

}  // namespace divdis
