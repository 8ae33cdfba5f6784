#include "divdis/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace divdis {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string model_name(std::size_t i, std::size_t count) {
  const int width = count <= 100 ? 2 : static_cast<int>(std::to_string(count - 1).size());
  char buf[32];
  std::snprintf(buf, sizeof buf, "m%0*zu", width, i);
  return buf;
}

// Substream layout: 0 labels, 1 model parameters, 2 + m * n_splits + s noise.
constexpr std::uint64_t kLabelStream = 0;
constexpr std::uint64_t kParamStream = 1;

PredictionSet make_set(const std::string& model, const std::string& split, std::size_t n,
                       std::size_t k, const std::vector<double>& probs,
                       const std::vector<double>& logits) {
  return validate_prediction_set(model, split, n, k, probs, std::span<const double>(logits), k);
}

}  // namespace

SynthRng::SynthRng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(seed ^ splitmix64(stream))) {}

double SynthRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SynthRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SynthRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::size_t SynthRng::below(std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
}

void SynthConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::InvalidArgument, "synth: " + what); };
  if (n_models < 1) bad("need at least one model");
  if (n_samples < 1) bad("need at least one sample");
  if (n_classes < 2) bad("need at least two classes");
  if (!(skill_lo > 0.0) || skill_hi < skill_lo) bad("skill range must satisfy 0 < lo <= hi");
  if (!(temperature_lo > 0.0) || temperature_hi < temperature_lo) {
    bad("temperature range must satisfy 0 < lo <= hi");
  }
  if (!(id_noise >= 0.0) || !std::isfinite(id_noise)) bad("ID noise must be finite and >= 0");
  for (double s : severities) {
    if (!(s >= 0.0) || !std::isfinite(s)) bad("severities must be finite and >= 0");
  }
}

SynthWorld generate_world(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_samples;
  const std::size_t k = cfg.n_classes;

  SynthWorld world;
  auto& ens = world.ensemble;
  auto& man = ens.manifest;
  man.k = k;
  man.id_split = "id";
  std::vector<double> noise{cfg.id_noise};
  for (std::size_t s = 0; s < cfg.severities.size(); ++s) {
    man.ood_splits.push_back("sev" + std::to_string(s + 1));
    noise.push_back(cfg.severities[s]);
  }
  const auto splits = man.splits();

  LabelVector labels;
  {
    SynthRng rng(cfg.seed, kLabelStream);
    labels.labels.resize(n);
    for (auto& y : labels.labels) y = static_cast<std::int32_t>(rng.below(k));
  }
  for (const auto& split : splits) {
    LabelVector lv = labels;
    lv.split_id = split;
    ens.labels.emplace(split, std::move(lv));
  }

  SynthRng params(cfg.seed, kParamStream);
  for (std::size_t m = 0; m < cfg.n_models; ++m) {
    SynthModel model{model_name(m, cfg.n_models), 0.0, 0.0};
    model.skill = params.uniform(cfg.skill_lo, cfg.skill_hi);
    model.temperature = params.uniform(cfg.temperature_lo, cfg.temperature_hi);
    world.models.push_back(model);
    man.models.push_back({model.id, {}});
  }

  std::vector<double> probs(n * k);
  std::vector<double> logits(n * k);
  const double id_var = cfg.id_noise * cfg.id_noise;
  for (std::size_t m = 0; m < cfg.n_models; ++m) {
    const auto& model = world.models[m];
    // Bayes-optimal logit scale for the ID noise level; noise-free ID keeps raw logits.
    const double kappa = id_var > 0.0 ? model.skill * std::sqrt(1.0 + id_var) / id_var : 1.0;
    for (std::size_t s = 0; s < splits.size(); ++s) {
      SynthRng rng(cfg.seed, 2 + m * splits.size() + s);
      const double sigma = noise[s];
      const double scale = 1.0 / std::sqrt(1.0 + sigma * sigma);
      for (std::size_t i = 0; i < n; ++i) {
        const auto y = static_cast<std::size_t>(labels.labels[i]);
        double* z = logits.data() + i * k;
        double zmax = -INFINITY;
        for (std::size_t c = 0; c < k; ++c) {
          z[c] = kappa * scale * ((c == y ? model.skill : 0.0) + sigma * rng.normal());
          zmax = std::max(zmax, z[c] / model.temperature);
        }
        double* p = probs.data() + i * k;
        double total = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
          p[c] = std::exp(z[c] / model.temperature - zmax);
          total += p[c];
        }
        for (std::size_t c = 0; c < k; ++c) p[c] /= total;
      }
      ens.predictions[model.id].emplace(splits[s], make_set(model.id, splits[s], n, k, probs, logits));
    }
  }
  return world;
}

SynthWorld generate_planted_world(std::size_t n_models) {
  if (n_models < 2 || n_models > 10) {
    fail(ErrorCode::InvalidArgument, "planted world supports 2..10 models");
  }
  constexpr std::size_t n = 2000;
  constexpr std::size_t k = 2;
  // Error counts out of n: common block c, private block per model.
  struct Layout {
    std::string split;
    std::size_t common;
    std::size_t (*private_count)(std::size_t);
  };
  const Layout layouts[] = {
      {"id", 100, [](std::size_t i) { return 10 * i; }},
      {"shift1", 200, [](std::size_t i) { return 17 * i + 30; }},
  };

  SynthWorld world;
  auto& ens = world.ensemble;
  auto& man = ens.manifest;
  man.k = k;
  man.id_split = "id";
  man.ood_splits = {"shift1"};

  LabelVector labels;
  labels.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) labels.labels[i] = static_cast<std::int32_t>(i % 2);

  for (std::size_t m = 1; m <= n_models; ++m) {
    world.models.push_back({model_name(m - 1, n_models), 0.0, 1.0});
    man.models.push_back({world.models.back().id, {}});
  }

  for (const auto& layout : layouts) {
    LabelVector lv = labels;
    lv.split_id = layout.split;
    ens.labels.emplace(layout.split, std::move(lv));

    // wrong[m][i]: model m (1-based) errs on sample i.
    std::vector<std::vector<bool>> wrong(n_models + 1, std::vector<bool>(n, false));
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < layout.common; ++i, ++cursor) {
      for (std::size_t m = 1; m <= n_models; ++m) wrong[m][cursor] = true;
    }
    for (std::size_t m = 1; m <= n_models; ++m) {
      for (std::size_t i = 0; i < layout.private_count(m); ++i, ++cursor) wrong[m][cursor] = true;
    }

    for (std::size_t m = 1; m <= n_models; ++m) {
      std::vector<double> probs(n * k, 0.0);
      std::vector<double> logits(n * k, -2.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto y = static_cast<std::size_t>(labels.labels[i]);
        const std::size_t pred = wrong[m][i] ? 1 - y : y;
        probs[i * k + pred] = 1.0;
        logits[i * k + pred] = 2.0;
      }
      const auto& id = world.models[m - 1].id;
      ens.predictions[id].emplace(layout.split, make_set(id, layout.split, n, k, probs, logits));
    }
  }
  return world;
}

}  // namespace divdis
