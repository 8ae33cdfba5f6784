#pragma once

#include <string>
#include <vector>

#include "divdis/core.hpp"
#include "divdis/linefit.hpp"

namespace divdis {

/// ID vs OOD values behind one on-the-line fit, one entry per pair or model.
struct OnTheLine {
  std::vector<std::string> units;  // "a|b" for pairs, model id for models
  std::vector<double> id;
  std::vector<double> ood;
  LineFit fit;
};

/// Agreement-on-the-line: ID vs OOD mean disagreement over the manifest's pairs.
OnTheLine agreement_line(const Ensemble& ens, const std::string& ood_split, Notion n,
                         TransformKind t = TransformKind::Identity, EpsilonPolicy eps = {});

/// Accuracy-on-the-line: ID vs OOD error over the estimated models. Requires
/// labels on both splits.
OnTheLine accuracy_line(const Ensemble& ens, const std::string& ood_split, Notion n,
                        TransformKind t = TransformKind::Identity, EpsilonPolicy eps = {});

std::string pair_label(const ModelPair& p);

}  // namespace divdis
