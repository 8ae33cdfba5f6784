#pragma once

// Dataset-level reductions fanned out across model pairs / models with OpenMP.
// Each pair's reduction is serial and ordered, so results do not depend on the
// thread count. The `serial` namespace keeps plain-loop references used by the
// tests and the benchmark.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "divdis/core.hpp"
#include "divdis/divergence.hpp"

namespace divdis {

struct PairIndex {
  std::size_t a;
  std::size_t b;
};

/// Sets the OpenMP team size used by the kernels; n <= 0 restores the default.
void set_worker_threads(int n);
int worker_threads();

/// Mean disagreement per pair of prediction sets.
std::vector<double> pair_disagreements(std::span<const PredictionSet* const> sets,
                                       std::span<const PairIndex> pairs, Notion n,
                                       EpsilonPolicy eps = {});

/// Mean error per prediction set against shared labels.
std::vector<double> model_errors(std::span<const PredictionSet* const> sets,
                                 const LabelVector& labels, Notion n, EpsilonPolicy eps = {});

// Ensemble conveniences: resolve ids on one split, then call the kernels above.
std::vector<double> pair_disagreements(const Ensemble& ens, std::span<const ModelPair> pairs,
                                       const std::string& split, Notion n,
                                       EpsilonPolicy eps = {});
std::vector<double> model_errors(const Ensemble& ens, std::span<const std::string> models,
                                 const std::string& split, Notion n, EpsilonPolicy eps = {});

namespace serial {

std::vector<double> pair_disagreements(std::span<const PredictionSet* const> sets,
                                       std::span<const PairIndex> pairs, Notion n,
                                       EpsilonPolicy eps = {});
std::vector<double> model_errors(std::span<const PredictionSet* const> sets,
                                 const LabelVector& labels, Notion n, EpsilonPolicy eps = {});

}  // namespace serial

}  // namespace divdis
