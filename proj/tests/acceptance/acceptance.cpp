// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   acceptance <path-to-divdis-cli> [--print-regression]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "divdis/calibration.hpp"
#include "divdis/detect.hpp"
#include "divdis/divergence.hpp"
#include "divdis/estimate.hpp"
#include "divdis/grid.hpp"
#include "divdis/io.hpp"
#include "divdis/kernels.hpp"
#include "divdis/linefit.hpp"
#include "divdis/lines.hpp"
#include "divdis/synth.hpp"
#include "../ddpm_corpus.hpp"
#include "../support.hpp"

namespace fs = std::filesystem;
using namespace divdis;
using testing_support::random_simplex;
using Vec = std::vector<double>;

namespace {

struct Regression {
  std::string key;
  double value;
};

#include "regression_values.inc"

class Verdict {
 public:
  void fail(const std::string& why) {
    if (failures_ < 5) notes_ << (failures_ ? "; " : "") << why;
    ++failures_;
  }
  void expect(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
  bool ok() const { return failures_ == 0; }
  std::string notes() const { return notes_.str(); }
  std::size_t failures() const { return failures_; }

 private:
  std::size_t failures_ = 0;
  std::ostringstream notes_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- oracles

long double kl_ld(const Vec& p, const std::vector<long double>& m) {
  long double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) s += p[i] * std::log(static_cast<long double>(p[i]) / m[i]);
  }
  return s;
}

long double hd_oracle(const Vec& p, const Vec& q) {
  long double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long double d = std::sqrt(static_cast<long double>(p[i])) - std::sqrt(static_cast<long double>(q[i]));
    s += d * d;
  }
  return std::sqrt(s / 2);
}

long double jsd_oracle(const Vec& p, const Vec& q) {
  std::vector<long double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = (static_cast<long double>(p[i]) + q[i]) / 2;
  return (kl_ld(p, m) + kl_ld(q, m)) / 2;
}

long double kld_oracle(const Vec& p, const Vec& q) {
  return (kl_ld(p, {q.begin(), q.end()}) + kl_ld(q, {p.begin(), p.end()})) / 2;
}

double brute_auc(const Vec& id, const Vec& ood) {
  std::uint64_t twice = 0;
  for (double a : id) {
    for (double b : ood) twice += b > a ? 2 : (b == a ? 1 : 0);
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(id.size()) * static_cast<double>(ood.size()));
}

// ---------------------------------------------------------------- criteria

Verdict divergence_axioms(double& secs) {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  for (std::size_t k : {2u, 3u, 10u, 100u}) {
    for (int t = 0; t < 10000; ++t) {
      const auto p = random_simplex(rng, k, t % 4 == 0);
      const auto q = random_simplex(rng, k, t % 7 == 0);
      const auto r = random_simplex(rng, k);
      for (Notion n : kAllNotions) {
        if (disagreement(n, p, q) != disagreement(n, q, p)) v.fail("asymmetric " + std::string(to_string(n)));
      }
      v.expect(dis_hellinger(p, p) == 0 && dis_jsd(p, p) == 0 && dis_kld_sym(p, p) == 0 && dis_top1(p, p) == 0,
               "identity");
      v.expect(dis_hellinger(p, q) <= 1.0, "HD bound");
      v.expect(dis_jsd(p, q) <= std::numbers::ln2, "JSD bound");
      v.expect(dis_hellinger(p, r) <= dis_hellinger(p, q) + dis_hellinger(q, r) + 1e-12, "HD triangle");
    }
  }
  secs = seconds_since(t0);
  v.expect(secs < 5.0, "runtime " + fmt(secs) + " s");
  return v;
}

Verdict error_identity() {
  Verdict v;
  std::mt19937_64 rng(103);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t k = 2 + rng() % 99;
    auto p = random_simplex(rng, k, t % 3 == 0);
    const std::size_t y = rng() % k;
    const auto e = one_hot(k, y);
    v.expect(std::abs(error_pointwise(Notion::HD, p, y) - dis_hellinger(e, p)) <= 1e-12, "HD closed form");
    v.expect(std::abs(error_pointwise(Notion::JSD, p, y) - dis_jsd(e, p)) <= 1e-12, "JSD closed form");
    if (p[y] >= 1e-12) {
      v.expect(std::abs(error_pointwise(Notion::KLD, p, y) + std::log(p[y])) <= 1e-12, "KLD = -ln p_y");
    }
  }
  return v;
}

Verdict worked_values() {
  Verdict v;
  auto check = [&](const char* what, double got, long double oracle, double stated) {
    v.expect(std::abs(got - static_cast<double>(oracle)) <= 1e-6, std::string(what) + " vs oracle");
    v.expect(std::abs(static_cast<double>(oracle) - stated) <= 1e-6, std::string(what) + " oracle vs stated");
  };
  check("HD", dis_hellinger(Vec{0.5, 0.5}, Vec{1, 0}), hd_oracle({0.5, 0.5}, {1, 0}), 0.5411961);
  check("JSD", dis_jsd(Vec{0.5, 0.5}, Vec{1, 0}), jsd_oracle({0.5, 0.5}, {1, 0}), 0.2157616);
  check("KLD", dis_kld_sym(Vec{0.5, 0.5}, Vec{0.9, 0.1}), kld_oracle({0.5, 0.5}, {0.9, 0.1}), 0.4394449);
  return v;
}

Verdict roc_oracle() {
  Verdict v;
  std::mt19937_64 rng(107);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t ni = 1 + rng() % 100, no = 1 + rng() % 100;
    const int levels = 1 + static_cast<int>(rng() % 20);
    Vec id(ni), ood(no);
    for (auto& s : id) s = static_cast<double>(rng() % levels) / 3.0;
    for (auto& s : ood) s = static_cast<double>(rng() % levels + (t % 2)) / 3.0;
    const double auc = roc_auc(id, ood);
    v.expect(auc == brute_auc(id, ood), "instance " + std::to_string(t) + " differs from brute force");
    v.expect(auc + roc_auc(ood, id) == 1.0, "complement instance " + std::to_string(t));
  }
  return v;
}

Verdict ols_oracle() {
  Verdict v;
  std::mt19937_64 rng(109);
  std::normal_distribution<double> g(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 3 + rng() % 300;
    Vec x(n), y(n);
    const double a = 3 * g(rng), b = g(rng), s = std::abs(g(rng));
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = a * x[i] + b + s * g(rng);
    }
    long double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sx += x[i];
      sy += y[i];
      sxx += static_cast<long double>(x[i]) * x[i];
      sxy += static_cast<long double>(x[i]) * y[i];
      syy += static_cast<long double>(y[i]) * y[i];
    }
    const long double nn = static_cast<long double>(n);
    const long double ao = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const long double bo = (sy - ao * sx) / nn;
    long double res = 0, tot = 0;
    for (std::size_t i = 0; i < n; ++i) {
      res += (y[i] - ao * x[i] - bo) * (y[i] - ao * x[i] - bo);
      tot += (y[i] - sy / nn) * (y[i] - sy / nn);
    }
    const long double cov = nn * sxy - sx * sy;
    const long double pearson2 = cov * cov / ((nn * sxx - sx * sx) * (nn * syy - sy * sy));
    const auto f = ols_fit(x, y);
    v.expect(std::abs(f.slope - static_cast<double>(ao)) <= 1e-10, "slope");
    v.expect(std::abs(f.intercept - static_cast<double>(bo)) <= 1e-10, "intercept");
    v.expect(std::abs(f.r2 - static_cast<double>(1 - res / tot)) <= 1e-10, "R^2");
    v.expect(std::abs(f.r2 - static_cast<double>(pearson2)) <= 1e-10, "R^2 vs Pearson^2");
  }
  return v;
}

Verdict planted_line() {
  Verdict v;
  const auto world = generate_planted_world(6);
  const auto& ens = world.ensemble;
  for (Notion n : kAllNotions) {
    const std::string name(to_string(n));
    // One-hot rows: every disagreeing sample contributes the same constant.
    const double unit_dis = disagreement(n, Vec{1, 0}, Vec{0, 1});
    const double unit_err = error_pointwise(n, Vec{0, 1}, 0);
    const auto agree = agreement_line(ens, "shift1", n);
    const auto acc = accuracy_line(ens, "shift1", n);
    v.expect(std::abs(agree.fit.slope - kPlantedSlope) <= 1e-10, name + " agreement slope");
    v.expect(std::abs(agree.fit.intercept - kPlantedIntercept * unit_dis) <= 1e-10, name + " agreement intercept");
    v.expect(std::abs(acc.fit.slope - kPlantedSlope) <= 1e-10, name + " accuracy slope");
    v.expect(std::abs(acc.fit.intercept - kPlantedIntercept * unit_err) <= 1e-10, name + " accuracy intercept");
    if (n == Notion::KLD) continue;  // its error and disagreement units differ by ~1e-12 relative
    EstimationConfig cfg;
    cfg.notion = n;
    cfg.method = Method::ALineS;
    const auto rep = estimate_split(ens, "shift1", cfg);
    v.expect(rep.mape && *rep.mape < 1e-6, name + " ALine-S MAPE");
  }
  {
    EstimationConfig cfg;
    cfg.notion = Notion::KLD;
    const auto rep = estimate_split(ens, "shift1", cfg);
    v.expect(rep.mape && *rep.mape < 1e-6, "kld ALine-S MAPE");
  }

  // ALine-D on a metric-level planted world: pair disagreement is the mean of the
  // two models' errors on both splits, so the pair rows hold exactly.
  for (auto t : {TransformKind::Identity, TransformKind::Probit}) {
    const Vec id_err{0.04, 0.07, 0.1, 0.12, 0.15, 0.2};
    const std::size_t m = id_err.size();
    Vec tv(m);
    for (std::size_t i = 0; i < m; ++i) tv[i] = apply_transform(t, Notion::Top1, id_err[i]);
    Vec truth(m);
    for (std::size_t i = 0; i < m; ++i) {
      truth[i] = inverse_transform(t, Notion::Top1, kPlantedSlope * tv[i] + kPlantedIntercept);
    }
    Vec xs, ys;
    std::vector<PairObservation> obs;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double x = (tv[i] + tv[j]) / 2;
        const double y = kPlantedSlope * x + kPlantedIntercept;
        xs.push_back(inverse_transform(t, Notion::Top1, x));
        ys.push_back(inverse_transform(t, Notion::Top1, y));
        obs.push_back({i, j, ys.back()});
      }
    }
    const auto fit = fit_line(Notion::Top1, t, xs, ys);
    const std::string tn(to_string(t));
    v.expect(std::abs(fit.slope - kPlantedSlope) <= 1e-10, tn + " metric-level slope");
    v.expect(std::abs(fit.intercept - kPlantedIntercept) <= 1e-10, tn + " metric-level intercept");
    const auto d = aline_d(fit, id_err, obs, 1.0, t);
    const auto s = aline_s(fit, id_err, t);
    v.expect(mape(d.values, truth) < 1e-6, tn + " ALine-D MAPE " + fmt(mape(d.values, truth)));
    v.expect(mape(s.values, truth) < 1e-6, tn + " ALine-S MAPE");
  }
  return v;
}

struct SeededOutcome {
  std::vector<Regression> values;
  double seconds = 0;
};

// Runs the default seeded world; fills `values` in a fixed order.
Verdict seeded_end_to_end(SeededOutcome& out) {
  Verdict v;
  const auto t0 = Clock::now();
  SynthConfig cfg;  // 20 models, 2000 samples, 10 classes, 5 severities
  const auto world = generate_world(cfg);
  const auto& ens = world.ensemble;
  const std::string low = ens.manifest.ood_splits.front();

  for (Notion n : kAllNotions) {
    const std::string name(to_string(n));
    const double ra = agreement_line(ens, low, n).fit.r2;
    const double rc = accuracy_line(ens, low, n).fit.r2;
    v.expect(ra > 0.95, name + " agreement R^2 " + fmt(ra));
    v.expect(rc > 0.95, name + " accuracy R^2 " + fmt(rc));
    out.values.push_back({"r2.agreement." + name, ra});
    out.values.push_back({"r2.accuracy." + name, rc});
  }

  std::vector<ScoreKind> kinds{ScoreKind::neg_msp(), ScoreKind::neg_max_logit()};
  for (Notion n : kAllNotions) kinds.push_back(ScoreKind::pair(n));
  const auto suite = detection_suite(ens, ens.manifest.id_split, ens.manifest.ood_splits, kinds,
                                     ens.manifest.pairing);
  for (const auto& k : kinds) {
    double prev = -1;
    for (const auto& agg : suite.per_severity) {
      if (!(agg.kind == k)) continue;
      v.expect(agg.auc > prev, k.name() + " AUC not increasing at severity " + std::to_string(agg.severity));
      prev = agg.auc;
      out.values.push_back({"auc." + k.name() + ".sev" + std::to_string(agg.severity), agg.auc});
    }
  }

  auto cace_of = [&](const SynthWorld& w, const std::string& split) {
    std::vector<const PredictionSet*> sets;
    for (const auto& m : w.ensemble.manifest.models) sets.push_back(&w.ensemble.at(m.id, split));
    return ensemble_cace(sets, w.ensemble.labels.at(split));
  };
  SynthConfig sharp_cfg = cfg;
  sharp_cfg.temperature_lo = sharp_cfg.temperature_hi = 0.4;
  const auto sharp = generate_world(sharp_cfg);
  for (const auto& split : ens.manifest.splits()) {
    const double base = cace_of(world, split);
    const double hot = cace_of(sharp, split);
    v.expect(hot > base, "CACE t=0.4 <= t=1.0 on " + split);
    out.values.push_back({"cace.t1." + split, base});
    out.values.push_back({"cace.t0.4." + split, hot});
  }

  out.seconds = seconds_since(t0);
  v.expect(out.seconds < 60.0, "runtime " + fmt(out.seconds) + " s");

  if (kRegression.empty()) {
    v.fail("no frozen regression values");
  } else if (kRegression.size() != out.values.size()) {
    v.fail("regression table has " + std::to_string(kRegression.size()) + " entries, run produced " +
           std::to_string(out.values.size()));
  } else {
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      const auto& want = kRegression[i];
      const auto& got = out.values[i];
      v.expect(want.key == got.key, "regression key " + got.key);
      v.expect(std::abs(want.value - got.value) <= 1e-12 * std::max(1.0, std::abs(want.value)),
               "regression " + got.key + " = " + fmt(got.value) + ", frozen " + fmt(want.value));
    }
  }
  return v;
}

Verdict grids() {
  Verdict v;
  const std::size_t r = 200;
  for (Notion n : {Notion::HD, Notion::JSD, Notion::KLD}) {
    bool hit = false;
    for (const auto& pt : simplex_grid(n, AgainstAnchor{}, r)) {
      if (std::lround(pt.p1 * r) == 70 && std::lround(pt.p2 * r) == 65) {
        hit = true;
        v.expect(pt.value == 0.0, std::string(to_string(n)) + " nonzero at the anchor");
      }
    }
    v.expect(hit, "anchor not on the grid");
  }
  for (const auto& pt : simplex_grid(Notion::Top1, AgainstAnchor{}, r)) {
    const long i = std::lround(pt.p1 * r), j = std::lround(pt.p2 * r), k = static_cast<long>(r) - i - j;
    const double region = (i >= j && i >= k) ? 0.0 : 1.0;  // anchor argmax is class 0
    v.expect(pt.value == region, "top1 outside {0,1} regions");
  }
  for (Notion n : kAllNotions) {
    const auto c = binary_error_curve(n, r);
    v.expect(c.back().t == 1.0 && c.back().value == 0.0, std::string(to_string(n)) + " err(1) != 0");
  }
  v.expect(binary_error_curve(Notion::HD, r).front().value == 1.0, "err_HD(0) != 1");
  v.expect(std::abs(binary_error_curve(Notion::JSD, r).front().value - std::numbers::ln2) <= 1e-15,
           "err_JSD(0) != ln 2");
  const auto kld = binary_error_curve(Notion::KLD, r);
  v.expect(kld.front().value > 20.0, "err_KLD(0+) <= 20");
  return v;
}

int run(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

std::map<std::string, std::string> csv_outputs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") {
      out[fs::relative(e.path(), dir).generic_string()] = io::read_text(e.path());
    }
  }
  return out;
}

Verdict format_stability(const std::string& cli) {
  Verdict v;
  std::mt19937_64 rng(113);
  for (int t = 0; t < 50; ++t) {
    const std::uint32_t n = 1 + rng() % 200, k = 2 + rng() % 20;
    io::DdpmFile f{n, k, {}, {}};
    const bool logits = t % 2 == 0;
    for (std::uint32_t i = 0; i < n; ++i) {
      for (double p : random_simplex(rng, k, true)) {
        f.probs.push_back(static_cast<float>(p));
        if (logits) f.logits.push_back(static_cast<float>(std::log(p + 1e-6) * 3));
      }
    }
    const auto bytes = io::encode_ddpm(f);
    const auto back = io::decode_ddpm(bytes);
    v.expect(back == f && io::encode_ddpm(back) == bytes, "DDPM round trip");
  }
  const auto corpus = testing_support::malformed_corpus();
  v.expect(corpus.size() == 7, "corpus size");
  for (const auto& c : corpus) {
    try {
      io::decode_ddpm(c.bytes);
      v.fail(c.name + ": accepted");
    } catch (const Error& e) {
      v.expect(e.code() == c.expected, c.name + ": raised " + std::string(to_string(e.code())));
    }
  }

  const auto root = testing_support::scratch_dir("acceptance-format");
  const std::string world = (root / "world").string();
  if (run(cli + " synth --out " + world + " --models 6 --samples 500 --severities 1.2,2,3") != 0) {
    v.fail("synth failed");
    return v;
  }
  const std::string manifest = world + "/manifest.json";
  const std::vector<std::string> commands{
      "disagree", "error", "line", "estimate --table1 --r2-gate 0.5", "detect --table2", "calibrate"};
  auto run_all = [&](const std::string& tag, int threads) {
    const auto out = root / tag;
    for (const auto& c : commands) {
      const auto sub = c.substr(0, c.find(' '));
      if (run(cli + " " + c + " --manifest " + manifest + " --threads " + std::to_string(threads) +
              " --out " + (out / sub).string()) != 0) {
        v.fail(tag + ": '" + c + "' failed");
      }
    }
    return csv_outputs(out);
  };
  const auto a = run_all("run1-t1", 1);
  const auto b = run_all("run2-t1", 1);
  const auto c = run_all("run3-t8", 8);
  v.expect(!a.empty(), "no CSV reports");
  v.expect(a == b, "CSV differs between two runs");
  v.expect(a == c, "CSV differs between 1 and 8 threads");
  return v;
}

void report(const std::string& name, const Verdict& v, const std::string& detail = {}) {
  std::cout << (v.ok() ? "PASS" : "FAIL") << "  " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  if (!v.ok()) std::cout << " -- " << v.failures() << " failure(s): " << v.notes();
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <divdis-cli> [--print-regression]\n";
    return 2;
  }
  const std::string cli = argv[1];

  if (argc > 2 && std::string(argv[2]) == "--print-regression") {
    SeededOutcome out;
    seeded_end_to_end(out);
    std::cout << "// Frozen from the default seeded synthetic world (seed " << SynthConfig{}.seed
              << ").\nconst std::vector<Regression> kRegression{\n";
    for (const auto& r : out.values) std::cout << "    {\"" << r.key << "\", " << fmt(r.value) << "},\n";
    std::cout << "};\n";
    return 0;
  }

  bool all = true;
  auto record = [&](const std::string& name, const Verdict& v, const std::string& detail = {}) {
    report(name, v, detail);
    all = all && v.ok();
  };
  auto guarded = [&](const std::string& name, const std::function<Verdict(std::string&)>& body) {
    std::string detail;
    try {
      const auto v = body(detail);
      record(name, v, detail);
    } catch (const std::exception& e) {
      Verdict v;
      v.fail(std::string("exception: ") + e.what());
      record(name, v);
    }
  };

  guarded("divergence axioms", [](std::string& d) {
    double secs = 0;
    auto v = divergence_axioms(secs);
    d = "4 x 10000 pairs, " + fixed2(secs) + " s";
    return v;
  });
  guarded("error-disagreement identity", [](std::string& d) {
    d = "10000 draws";
    return error_identity();
  });
  guarded("worked values", [](std::string&) { return worked_values(); });
  guarded("ROC-AUC oracle equivalence", [](std::string& d) {
    d = "1000 instances";
    return roc_oracle();
  });
  guarded("OLS oracle", [](std::string& d) {
    d = "1000 instances";
    return ols_oracle();
  });
  guarded("planted-line recovery", [](std::string&) { return planted_line(); });
  guarded("seeded synthetic end-to-end", [](std::string& d) {
    SeededOutcome out;
    auto v = seeded_end_to_end(out);
    d = std::to_string(out.values.size()) + " frozen values, " + fixed2(out.seconds) + " s";
    return v;
  });
  guarded("figure-1/2 grids", [](std::string&) { return grids(); });
  guarded("format stability", [&](std::string&) { return format_stability(cli); });

  return all ? 0 : 1;
}
