#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "divdis/estimate.hpp"
#include "divdis/lines.hpp"
#include "divdis/synth.hpp"
#include "../check_code.hpp"

using namespace divdis;
using Vec = std::vector<double>;

namespace {

LineFit line(double a, double b, Notion n = Notion::HD, TransformKind t = TransformKind::Identity) {
  LineFit f;
  f.slope = a;
  f.intercept = b;
  f.r2 = 1.0;
  f.n_points = 2;
  f.transform = t;
  f.notion = n;
  return f;
}

SplitFits fits_with(const std::string& split, Vec r2s) {
  SplitFits out;
  for (std::size_t i = 0; i < r2s.size(); ++i) {
    auto f = line(1, 0, kAllNotions[i]);
    f.r2 = r2s[i];
    out[split][kAllNotions[i]] = f;
  }
  return out;
}

}  // namespace

TEST_CASE("aline-s") {
  CHECK(aline_s(line(0.5, 0.1), Vec{0.2}, TransformKind::Identity).values[0] == doctest::Approx(0.2));
  const Vec errs{0.05, 0.3, 0.7};
  CHECK(aline_s(line(1, 0), errs, TransformKind::Identity).values == errs);
  const auto hi = aline_s(line(2, 0.5), errs, TransformKind::Identity);
  CHECK(hi.values.back() == 1.0);
  CHECK(hi.clamped.back());
  CHECK_FALSE(hi.clamped.front());
  CHECK_ERROR_CODE(aline_s(line(1, 0), errs, TransformKind::Probit), ErrorCode::TransformMismatch);
  // KLD falls back to identity, so a probit request is consistent with an identity fit.
  CHECK_NOTHROW(aline_s(line(1, 0, Notion::KLD), errs, TransformKind::Probit));
}

TEST_CASE("aline-d recovers a planted solution") {
  for (auto t : {TransformKind::Identity, TransformKind::Probit}) {
    const auto f = line(1.3, 0.05, Notion::Top1, t);
    const Vec id_err{0.1, 0.2, 0.35};
    Vec v;
    for (double e : id_err) v.push_back(f(apply_transform(t, Notion::Top1, e)));
    std::vector<PairObservation> obs;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) {
        obs.push_back({i, j, inverse_transform(t, Notion::Top1, (v[i] + v[j]) / 2)});
      }
    }
    const auto est = aline_d(f, id_err, obs, 1.0, t);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(est.values[i] - inverse_transform(t, Notion::Top1, v[i])) < 1e-8);
    }
  }
}

TEST_CASE("aline-d approaches aline-s for heavy anchors") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.05, 0.4);
  Vec errs(6);
  for (auto& e : errs) e = u(rng);
  std::vector<PairObservation> obs;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) obs.push_back({i, j, u(rng)});
  }
  const auto f = line(1.2, 0.05);
  const auto s = aline_s(f, errs, TransformKind::Identity);
  const auto d = aline_d(f, errs, obs, 1e6, TransformKind::Identity);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(s.values[i] - d.values[i]) < 1e-6);
}

TEST_CASE("aline-d two-model hand solution") {
  // min (v1/2 + v2/2 - d)^2 + w (v1 - c1)^2 + w (v2 - c2)^2 has
  // v1 - v2 = c1 - c2 and (v1 + v2)/2 = (d + w (c1 + c2)) / (1 + 2 w).
  const double c1 = 0.2, c2 = 0.4, d = 0.5;
  for (double w : {0.25, 1.0, 3.0}) {
    const auto est = aline_d(line(1, 0), Vec{c1, c2}, std::vector<PairObservation>{{0, 1, d}}, w,
                             TransformKind::Identity);
    const double mean = (d + w * (c1 + c2)) / (1 + 2 * w);
    CHECK(est.values[0] == doctest::Approx(mean + (c1 - c2) / 2).epsilon(1e-12));
    CHECK(est.values[1] == doctest::Approx(mean - (c1 - c2) / 2).epsilon(1e-12));
  }
}

TEST_CASE("aline-d degenerate systems") {
  const std::vector<PairObservation> one{{0, 1, 0.2}};
  CHECK_ERROR_CODE(aline_d(line(1, 0), Vec{0.1, 0.2, 0.3}, one, 0.0, TransformKind::Identity),
                   ErrorCode::Underdetermined);
  // Pairs alone cannot separate two models.
  CHECK_ERROR_CODE(aline_d(line(1, 0), Vec{0.1, 0.2}, one, 0.0, TransformKind::Identity),
                   ErrorCode::SingularFit);
  // A triangle of pairs can.
  const std::vector<PairObservation> tri{{0, 1, 0.2}, {0, 2, 0.3}, {1, 2, 0.4}};
  const auto est = aline_d(line(1, 0), Vec{0.1, 0.2, 0.3}, tri, 0.0, TransformKind::Identity);
  CHECK(est.values[0] == doctest::Approx(0.1));
  CHECK(est.values[2] == doctest::Approx(0.5));
}

TEST_CASE("estimates do not depend on model order") {
  const Vec errs{0.1, 0.25, 0.3};
  const std::vector<PairObservation> obs{{0, 1, 0.2}, {0, 2, 0.35}, {1, 2, 0.3}};
  const Vec rev_errs{0.3, 0.25, 0.1};
  const std::vector<PairObservation> rev_obs{{2, 1, 0.2}, {2, 0, 0.35}, {1, 0, 0.3}};
  const auto a = aline_d(line(1.1, 0.02), errs, obs, 1.0, TransformKind::Identity);
  const auto b = aline_d(line(1.1, 0.02), rev_errs, rev_obs, 1.0, TransformKind::Identity);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.values[i] == doctest::Approx(b.values[2 - i]).epsilon(1e-12));
}

TEST_CASE("mape") {
  CHECK(mape(Vec{1.1}, Vec{1.0}) == doctest::Approx(10.0));
  CHECK(mape(Vec{0.3, 0.5}, Vec{0.3, 0.5}) == 0.0);
  CHECK(mape(Vec{0.2, 0.4}, Vec{0.25, 0.5}) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK_ERROR_CODE(mape(Vec{0.2}, Vec{0.0}), ErrorCode::ZeroTruth);
  CHECK_ERROR_CODE(mape(Vec{0.2, 0.1}, Vec{0.1}), ErrorCode::LengthMismatch);
}

TEST_CASE("r2 gate") {
  const std::vector<Notion> all(std::begin(kAllNotions), std::end(kAllNotions));
  CHECK(gate_by_r2(fits_with("a", {0.99, 0.97, 0.96, 0.98}), 0.95, all).size() == 1);
  CHECK(gate_by_r2(fits_with("a", {0.99, 0.94, 0.99, 0.99}), 0.95, all).empty());
  CHECK(gate_by_r2(fits_with("a", {0.1, 0.1, 0.1, 0.1}), 0.0, all).size() == 1);
  const std::vector<Notion> hd{Notion::HD};
  CHECK(gate_by_r2(fits_with("a", {0.1, 0.99}), 0.95, hd).size() == 1);
  CHECK_ERROR_CODE(gate_by_r2(fits_with("a", {0.99}), 0.95, all), ErrorCode::MissingNotionFit);

  EstimationConfig cfg;
  cfg.r2_gate = 0.0;
  CHECK_ERROR_CODE(cfg.validate(), ErrorCode::InvalidArgument);
  cfg.r2_gate = 1.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.anchor_weight = 0.0;
  CHECK_ERROR_CODE(cfg.validate(), ErrorCode::InvalidArgument);
}

TEST_CASE("default methods follow the pairing") {
  CHECK(default_method(Pairing::all_pairs()) == Method::ALineD);
  CHECK(default_method(Pairing::anchored("x")) == Method::ALineS);
  CHECK(parse_method("aline-d") == Method::ALineD);
  CHECK_FALSE(parse_method("alined").has_value());
}

TEST_CASE("planted world: lines and aline-s are exact") {
  const auto world = generate_planted_world(6);
  const auto& ens = world.ensemble;
  for (Notion n : kAllNotions) {
    const double scale = n == Notion::JSD ? std::log(2.0) : 1.0;
    const auto agree = agreement_line(ens, "shift1", n);
    CHECK(agree.id.size() == 15);
    if (n != Notion::KLD) {
      CHECK(std::abs(agree.fit.slope - kPlantedSlope) < 1e-10);
      CHECK(std::abs(agree.fit.intercept - kPlantedIntercept * scale) < 1e-10);
      const auto acc = accuracy_line(ens, "shift1", n);
      CHECK(std::abs(acc.fit.slope - kPlantedSlope) < 1e-10);
      CHECK(std::abs(acc.fit.intercept - kPlantedIntercept * scale) < 1e-10);
    }
    EstimationConfig cfg;
    cfg.notion = n;
    cfg.method = Method::ALineS;
    const auto rep = estimate_split(ens, "shift1", cfg);
    REQUIRE(rep.mape.has_value());
    CHECK(*rep.mape < 1e-6);
    CHECK(rep.models.size() == 6);
  }
}

TEST_CASE("estimate_split needs ID labels") {
  auto world = generate_planted_world(3);
  world.ensemble.labels.erase("id");
  CHECK_ERROR_CODE(estimate_split(world.ensemble, "shift1", EstimationConfig{}), ErrorCode::MissingLabels);
}
