#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "divdis/core.hpp"
#include "divdis/linefit.hpp"

namespace divdis {

enum class Method { ALineS, ALineD };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view s) noexcept;

struct EstimationConfig {
  Notion notion = Notion::HD;
  TransformKind transform = TransformKind::Identity;
  Method method = Method::ALineS;
  double r2_gate = 0.95;
  double anchor_weight = 1.0;

  void validate() const;
};

/// The default method for a pairing: ALine-S for anchored pairings, where
/// ALine-D's pair constraint ties error level to the anchor's disagreement.
Method default_method(const Pairing& pairing) noexcept;

struct Estimates {
  std::vector<double> values;
  std::vector<bool> clamped;  // true where the raw extrapolation left the notion's range
};

/// ALine-S: estimate_i = T^-1(a T(err_i) + b), clamped to the notion's range.
/// `errors_transform` is the transform the caller applies to the ID errors and
/// must match the fit's.
Estimates aline_s(const LineFit& fit, std::span<const double> id_errors,
                  TransformKind errors_transform);

/// Observed OOD disagreement of models i and j (indices into id_errors).
struct PairObservation {
  std::size_t i;
  std::size_t j;
  double value;
};

/// ALine-D: least squares over transformed OOD errors v with
///   (v_i + v_j) / 2 = T(dis_OOD(i, j))        one row per observed pair
///   v_i = a T(err_i) + b                      one row per model, weight w
/// where w multiplies the squared residual. Returns T^-1(v), clamped.
Estimates aline_d(const LineFit& fit, std::span<const double> id_errors,
                  std::span<const PairObservation> ood_disagreements, double anchor_weight,
                  TransformKind errors_transform);

/// 100 * mean(|est - true| / true); every truth must be positive.
double mape(std::span<const double> estimates, std::span<const double> truths);

using SplitFits = std::map<std::string, std::map<Notion, LineFit>>;

/// Splits whose agreement-line R^2 exceeds the gate for every listed notion,
/// in key order. A gate <= 0 admits everything.
std::vector<std::string> gate_by_r2(const SplitFits& fits, double r2_gate,
                                    std::span<const Notion> notions);

struct ModelEstimate {
  std::string model_id;
  double estimate = 0.0;
  std::optional<double> truth;
  bool clamped = false;
};

struct EstimationReport {
  std::string split;
  Notion notion = Notion::HD;
  Method method = Method::ALineS;
  LineFit fit;           // agreement line the estimate extrapolates
  bool admitted = false; // fit.r2 > r2_gate
  std::vector<ModelEstimate> models;
  std::optional<double> mape;  // present iff the OOD split has labels
};

/// Fits the agreement line for one OOD split and estimates every estimated
/// model's OOD error from its ID error.
EstimationReport estimate_split(const Ensemble& ens, const std::string& ood_split,
                                const EstimationConfig& cfg, EpsilonPolicy eps = {});

}  // namespace divdis
