#pragma once

#include <array>
#include <cstddef>
#include <variant>
#include <vector>

#include "divdis/divergence.hpp"

namespace divdis {

/// Default anchor for the 3-class disagreement heatmap.
inline constexpr std::array<double, 3> kDefaultGridAnchor{0.35, 0.325, 0.325};

/// Disagreement between each grid point and a fixed anchor distribution.
struct AgainstAnchor {
  std::array<double, 3> anchor = kDefaultGridAnchor;
};

/// Error of each grid point for the given true class.
struct ErrorForClass {
  std::size_t label = 0;
};

using GridMode = std::variant<AgainstAnchor, ErrorForClass>;

struct SimplexPoint {
  double p1;
  double p2;
  double value;
};

/// Evaluates a notion on the 3-class simplex at (i/R, j/R, (R-i-j)/R) for all
/// i + j <= R, rows ordered by i then j.
std::vector<SimplexPoint> simplex_grid(Notion n, const GridMode& mode, std::size_t resolution,
                                       EpsilonPolicy eps = {});

struct CurvePoint {
  double t;
  double value;
};

/// Binary error curve: error_pointwise(n, (t, 1-t), y=0) for t = i/R, i = 0..R.
std::vector<CurvePoint> binary_error_curve(Notion n, std::size_t resolution,
                                           EpsilonPolicy eps = {});

}  // namespace divdis
