#include "divdis/kernels.hpp"

#include <exception>
#include <map>

#include <omp.h>

namespace divdis {

namespace {

int g_default_threads = 0;

void check_pairs(std::span<const PredictionSet* const> sets, std::span<const PairIndex> pairs) {
  for (const auto& pr : pairs) {
    if (pr.a >= sets.size() || pr.b >= sets.size()) {
      fail(ErrorCode::InvalidArgument, "pair index out of range");
    }
    const auto& p = *sets[pr.a];
    const auto& q = *sets[pr.b];
    if (p.split_id() != q.split_id() || p.n_samples() != q.n_samples() ||
        p.n_classes() != q.n_classes()) {
      fail(ErrorCode::ShapeMismatch, "models '" + p.model_id() + "' and '" + q.model_id() +
                                         "' are not comparable");
    }
  }
}

void check_labels(std::span<const PredictionSet* const> sets, const LabelVector& labels) {
  for (const auto* s : sets) {
    if (s->n_samples() != labels.size()) {
      fail(ErrorCode::LengthMismatch, "split '" + s->split_id() + "': label count differs from '" +
                                          s->model_id() + "' predictions");
    }
  }
  validate_labels(labels, sets.empty() ? 0 : sets.front()->n_classes());
}

template <typename F>
void parallel_for(std::size_t count, F&& body) {
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(divdis_kernel_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

std::vector<const PredictionSet*> resolve(const Ensemble& ens, std::span<const std::string> ids,
                                          const std::string& split) {
  std::vector<const PredictionSet*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(&ens.at(id, split));
  return out;
}

}  // namespace

void set_worker_threads(int n) {
  if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : g_default_threads);
}

int worker_threads() { return omp_get_max_threads(); }

std::vector<double> pair_disagreements(std::span<const PredictionSet* const> sets,
                                       std::span<const PairIndex> pairs, Notion n,
                                       EpsilonPolicy eps) {
  check_pairs(sets, pairs);
  std::vector<double> out(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    out[i] = aggregate_disagreement(n, *sets[pairs[i].a], *sets[pairs[i].b], eps).value;
  });
  return out;
}

std::vector<double> model_errors(std::span<const PredictionSet* const> sets,
                                 const LabelVector& labels, Notion n, EpsilonPolicy eps) {
  check_labels(sets, labels);
  std::vector<double> out(sets.size());
  parallel_for(sets.size(), [&](std::size_t i) { out[i] = aggregate_error(n, *sets[i], labels, eps); });
  return out;
}

std::vector<double> pair_disagreements(const Ensemble& ens, std::span<const ModelPair> pairs,
                                       const std::string& split, Notion n, EpsilonPolicy eps) {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> ids;
  std::vector<PairIndex> idx;
  idx.reserve(pairs.size());
  auto slot = [&](const std::string& id) {
    auto [it, inserted] = index.try_emplace(id, ids.size());
    if (inserted) ids.push_back(id);
    return it->second;
  };
  for (const auto& p : pairs) idx.push_back({slot(p.first), slot(p.second)});
  const auto sets = resolve(ens, ids, split);
  return pair_disagreements(sets, idx, n, eps);
}

std::vector<double> model_errors(const Ensemble& ens, std::span<const std::string> models,
                                 const std::string& split, Notion n, EpsilonPolicy eps) {
  const auto* labels = ens.labels_for(split);
  if (labels == nullptr) fail(ErrorCode::MissingLabels, "no labels for split '" + split + "'");
  const auto sets = resolve(ens, models, split);
  return model_errors(sets, *labels, n, eps);
}

namespace serial {

std::vector<double> pair_disagreements(std::span<const PredictionSet* const> sets,
                                       std::span<const PairIndex> pairs, Notion n,
                                       EpsilonPolicy eps) {
  check_pairs(sets, pairs);
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& pr : pairs) {
    out.push_back(aggregate_disagreement(n, *sets[pr.a], *sets[pr.b], eps).value);
  }
  return out;
}

std::vector<double> model_errors(std::span<const PredictionSet* const> sets,
                                 const LabelVector& labels, Notion n, EpsilonPolicy eps) {
  check_labels(sets, labels);
  std::vector<double> out;
  out.reserve(sets.size());
  for (const auto* s : sets) out.push_back(aggregate_error(n, *s, labels, eps));
  return out;
}

}  // namespace serial

}  // namespace divdis
