#include "divdis/lines.hpp"

#include "divdis/kernels.hpp"

namespace divdis {

std::string pair_label(const ModelPair& p) { return p.first + "|" + p.second; }

OnTheLine agreement_line(const Ensemble& ens, const std::string& ood_split, Notion n,
                         TransformKind t, EpsilonPolicy eps) {
  const auto pairs = enumerate_pairs(ens.manifest);
  OnTheLine out;
  out.units.reserve(pairs.size());
  for (const auto& p : pairs) out.units.push_back(pair_label(p));
  out.id = pair_disagreements(ens, pairs, ens.manifest.id_split, n, eps);
  out.ood = pair_disagreements(ens, pairs, ood_split, n, eps);
  out.fit = fit_line(n, t, out.id, out.ood);
  return out;
}

OnTheLine accuracy_line(const Ensemble& ens, const std::string& ood_split, Notion n,
                        TransformKind t, EpsilonPolicy eps) {
  OnTheLine out;
  out.units = estimated_models(ens.manifest);
  out.id = model_errors(ens, out.units, ens.manifest.id_split, n, eps);
  out.ood = model_errors(ens, out.units, ood_split, n, eps);
  out.fit = fit_line(n, t, out.id, out.ood);
  return out;
}

}  // namespace divdis
