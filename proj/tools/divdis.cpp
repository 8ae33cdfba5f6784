// divdis: disagreement-based OOD diagnostics from prediction files.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "divdis/calibration.hpp"
#include "divdis/detect.hpp"
#include "divdis/divergence.hpp"
#include "divdis/estimate.hpp"
#include "divdis/grid.hpp"
#include "divdis/io.hpp"
#include "divdis/kernels.hpp"
#include "divdis/lines.hpp"
#include "divdis/report.hpp"
#include "divdis/synth.hpp"

namespace fs = std::filesystem;
using namespace divdis;
using report::Cell;
using report::Table;

namespace {

struct Common {
  std::string manifest;
  std::vector<std::string> notions{"top1", "hd", "jsd", "kld"};
  std::string transform = "identity";
  std::string out = "divdis-out";
  std::vector<std::string> formats{"csv", "json"};
  bool force = false;
  int threads = 0;
};

std::vector<Notion> parse_notions(const std::vector<std::string>& names) {
  std::vector<Notion> out;
  for (const auto& s : names) {
    if (s == "all") return {std::begin(kAllNotions), std::end(kAllNotions)};
    const auto n = parse_notion(s);
    if (!n) fail(ErrorCode::InvalidArgument, "unknown notion '" + s + "'");
    if (std::find(out.begin(), out.end(), *n) == out.end()) out.push_back(*n);
  }
  if (out.empty()) fail(ErrorCode::InvalidArgument, "no notion selected");
  return out;
}

TransformKind parse_transform_or_fail(const std::string& s) {
  const auto t = parse_transform(s);
  if (!t) fail(ErrorCode::InvalidArgument, "unknown transform '" + s + "'");
  return *t;
}

std::vector<report::Format> parse_formats(const std::vector<std::string>& names) {
  std::vector<report::Format> out;
  for (const auto& s : names) {
    if (s == "csv") {
      out.push_back(report::Format::Csv);
    } else if (s == "json") {
      out.push_back(report::Format::Json);
    } else {
      fail(ErrorCode::InvalidArgument, "unknown format '" + s + "'");
    }
  }
  return out;
}

void add_common(CLI::App* cmd, Common& c, bool needs_manifest) {
  auto* m = cmd->add_option("--manifest", c.manifest, "Ensemble manifest (JSON)");
  if (needs_manifest) m->required();
  cmd->add_option("--out", c.out, "Output directory (created if absent)")->capture_default_str();
  cmd->add_option("--format", c.formats, "Report formats: csv, json")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_flag("--force", c.force, "Overwrite existing report files");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = OpenMP default)")
      ->capture_default_str();
}

void add_notions(CLI::App* cmd, Common& c) {
  cmd->add_option("--notion", c.notions, "Notions: top1, hd, jsd, kld, all")
      ->delimiter(',')
      ->capture_default_str();
}

void add_transform(CLI::App* cmd, Common& c) {
  cmd->add_option("--transform", c.transform, "Axis transform: identity, probit")
      ->check(CLI::IsMember({"identity", "probit"}))
      ->capture_default_str();
}

class Emitter {
 public:
  explicit Emitter(const Common& c) : dir_(c.out), formats_(parse_formats(c.formats)), force_(c.force) {
    if (formats_.empty()) fail(ErrorCode::InvalidArgument, "no output format selected");
  }

  void emit(const Table& t) {
    for (const auto& p : report::write_table(t, dir_, formats_, force_)) {
      std::cout << "wrote " << p.generic_string() << "\n";
    }
  }

 private:
  fs::path dir_;
  std::vector<report::Format> formats_;
  bool force_;
};

Ensemble load(const Common& c) {
  set_worker_threads(c.threads);
  return io::load_ensemble(io::load_manifest(c.manifest));
}

Cell num(double v) { return v; }
Cell str(std::string s) { return s; }
Cell integer(std::size_t v) { return static_cast<std::int64_t>(v); }

// ---------------------------------------------------------------- disagree

void run_disagree(const Common& c) {
  const auto ens = load(c);
  const auto notions = parse_notions(c.notions);
  const auto pairs = enumerate_pairs(ens.manifest);
  Table t{"disagreement", {}, {"model_a", "model_b", "split", "notion", "value"}, {}};
  for (const auto& split : ens.manifest.splits()) {
    for (Notion n : notions) {
      const auto values = pair_disagreements(ens, pairs, split, n);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        t.add({str(pairs[i].first), str(pairs[i].second), str(split),
               str(std::string(to_string(n))), num(values[i])});
      }
    }
  }
  Emitter(c).emit(t);
}

// ---------------------------------------------------------------- error

void run_error(const Common& c) {
  const auto ens = load(c);
  const auto notions = parse_notions(c.notions);
  auto models = ens.manifest.model_ids();
  std::sort(models.begin(), models.end());
  Table t{"error", {}, {"model", "split", "notion", "error"}, {}};
  for (const auto& split : ens.manifest.splits()) {
    if (ens.labels_for(split) == nullptr) continue;
    for (Notion n : notions) {
      const auto values = model_errors(ens, models, split, n);
      for (std::size_t i = 0; i < models.size(); ++i) {
        t.add({str(models[i]), str(split), str(std::string(to_string(n))), num(values[i])});
      }
    }
  }
  if (t.rows.empty()) fail(ErrorCode::MissingLabels, "manifest lists no label files");
  Emitter(c).emit(t);
}

// ---------------------------------------------------------------- line

void add_fit_row(Table& t, const std::string& kind, Notion n, const std::string& split,
                 const LineFit& f) {
  t.add({str(kind), str(std::string(to_string(n))), str(split), num(f.slope), num(f.intercept),
         num(f.r2), str(std::string(to_string(f.transform))), integer(f.n_points),
         Cell(f.transform_downgraded)});
}

void add_points(Table& t, const std::string& kind, Notion n, const std::string& split,
                const OnTheLine& l) {
  for (std::size_t i = 0; i < l.units.size(); ++i) {
    t.add({str(kind), str(std::string(to_string(n))), str(split), str(l.units[i]), num(l.id[i]),
           num(l.ood[i])});
  }
}

void run_line(const Common& c) {
  const auto ens = load(c);
  const auto notions = parse_notions(c.notions);
  const auto tf = parse_transform_or_fail(c.transform);
  const bool have_id_labels = ens.labels_for(ens.manifest.id_split) != nullptr;

  Table fits{"lines",
             {},
             {"kind", "notion", "split", "slope", "intercept", "r2", "transform", "n_points",
              "transform_downgraded"},
             {}};
  Table points{"line_points", {}, {"kind", "notion", "split", "unit", "id", "ood"}, {}};
  for (const auto& split : ens.manifest.ood_splits) {
    for (Notion n : notions) {
      const auto agree = agreement_line(ens, split, n, tf);
      add_fit_row(fits, "agreement", n, split, agree.fit);
      add_points(points, "agreement", n, split, agree);
      if (have_id_labels && ens.labels_for(split) != nullptr) {
        const auto acc = accuracy_line(ens, split, n, tf);
        add_fit_row(fits, "accuracy", n, split, acc.fit);
        add_points(points, "accuracy", n, split, acc);
      }
    }
  }
  Emitter e(c);
  e.emit(fits);
  e.emit(points);
}

// ---------------------------------------------------------------- estimate

struct EstimateOpts {
  std::string method;
  double r2_gate = 0.95;
  double anchor_weight = 1.0;
  bool table1 = false;
};

void run_estimate(const Common& c, const EstimateOpts& o) {
  const auto ens = load(c);
  const auto notions = parse_notions(c.notions);
  EstimationConfig cfg;
  cfg.transform = parse_transform_or_fail(c.transform);
  cfg.r2_gate = o.r2_gate;
  cfg.anchor_weight = o.anchor_weight;
  if (o.method.empty()) {
    cfg.method = default_method(ens.manifest.pairing);
  } else {
    const auto m = parse_method(o.method);
    if (!m) fail(ErrorCode::InvalidArgument, "unknown method '" + o.method + "'");
    cfg.method = *m;
  }
  cfg.validate();
  if (ens.labels_for(ens.manifest.id_split) == nullptr) {
    fail(ErrorCode::MissingLabels, "estimation needs labels for the ID split");
  }

  std::vector<EstimationReport> reports;
  SplitFits fits;
  for (const auto& split : ens.manifest.ood_splits) {
    for (Notion n : notions) {
      cfg.notion = n;
      reports.push_back(estimate_split(ens, split, cfg));
      fits[split][n] = reports.back().fit;
    }
  }
  const auto admitted = gate_by_r2(fits, cfg.r2_gate, notions);
  auto is_admitted = [&](const std::string& s) {
    return std::find(admitted.begin(), admitted.end(), s) != admitted.end();
  };

  Table rows{"estimate",
             {},
             {"split", "notion", "method", "model", "estimate", "truth", "clamped"},
             {}};
  Table summary{"estimate_summary",
                {"admitted: agreement-line R^2 > " + report::format_sig6(cfg.r2_gate) +
                 " for every selected notion"},
                {"split", "notion", "method", "slope", "intercept", "r2", "transform", "admitted",
                 "mape"},
                {}};
  for (const auto& r : reports) {
    const auto notion = std::string(to_string(r.notion));
    const auto method = std::string(to_string(r.method));
    for (const auto& m : r.models) {
      rows.add({str(r.split), str(notion), str(method), str(m.model_id), num(m.estimate),
                m.truth ? num(*m.truth) : Cell{}, Cell(m.clamped)});
    }
    summary.add({str(r.split), str(notion), str(method), num(r.fit.slope), num(r.fit.intercept),
                 num(r.fit.r2), str(std::string(to_string(r.fit.transform))),
                 Cell(is_admitted(r.split)), r.mape ? num(*r.mape) : Cell{}});
  }

  Emitter e(c);
  e.emit(rows);
  e.emit(summary);

  if (o.table1) {
    Table t1{"table1",
             {"MAPE (%) of OOD error estimates, " + std::string(to_string(cfg.method)) +
              ", splits passing the R^2 gate"},
             {"split"},
             {}};
    for (Notion n : notions) t1.columns.emplace_back(to_string(n));
    for (const auto& split : ens.manifest.ood_splits) {
      if (!is_admitted(split)) continue;
      std::vector<Cell> row{str(split)};
      for (Notion n : notions) {
        const auto it = std::find_if(reports.begin(), reports.end(), [&](const auto& r) {
          return r.split == split && r.notion == n;
        });
        row.push_back(it->mape ? str(report::format_fixed2(*it->mape)) : Cell{});
      }
      t1.add(std::move(row));
    }
    e.emit(t1);
    std::cout << report::to_csv(t1);
  }
}

// ---------------------------------------------------------------- detect

struct DetectOpts {
  std::vector<std::string> kinds;
  bool pooled = false;
  bool table2 = false;
};

void run_detect(const Common& c, const DetectOpts& o) {
  const auto ens = load(c);
  std::vector<ScoreKind> kinds;
  auto names = o.kinds;
  if (names.empty()) {
    const auto& first = ens.at(ens.manifest.models.front().id, ens.manifest.id_split);
    if (first.has_logits()) names.push_back("neg-maxlogit");
    names.insert(names.end(), {"neg-msp", "pair-top1", "pair-hd", "pair-jsd", "pair-kld"});
  }
  for (const auto& s : names) {
    const auto k = parse_score_kind(s);
    if (!k) fail(ErrorCode::InvalidArgument, "unknown score kind '" + s + "'");
    kinds.push_back(*k);
  }
  const auto suite = detection_suite(ens, ens.manifest.id_split, ens.manifest.ood_splits, kinds,
                                     ens.manifest.pairing,
                                     o.pooled ? DetectionMode::Pooled : DetectionMode::PerUnit);

  Table rows{"detect", {}, {"kind", "unit", "id_split", "ood_split", "auc", "n_id", "n_ood"}, {}};
  for (const auto& r : suite.rows) {
    rows.add({str(r.kind.name()), str(r.unit), str(r.id_split), str(r.ood_split), num(r.auc),
              integer(r.n_id), integer(r.n_ood)});
  }
  Table per_split{"detect_split", {}, {"kind", "ood_split", "severity", "auc"}, {}};
  for (const auto& r : suite.per_split) {
    per_split.add({str(r.kind.name()), str(r.ood_split), Cell(std::int64_t{r.severity}), num(r.auc)});
  }
  Table per_sev{"detect_severity", {}, {"kind", "severity", "auc", "n_splits"}, {}};
  for (const auto& r : suite.per_severity) {
    per_sev.add({str(r.kind.name()), Cell(std::int64_t{r.severity}), num(r.auc), integer(r.n_splits)});
  }
  Emitter e(c);
  e.emit(rows);
  e.emit(per_split);
  e.emit(per_sev);

  if (o.table2) {
    Table t2{"table2", {"ROC-AUC (%) for ID vs OOD, averaged over splits of each severity"},
             {"severity"}, {}};
    std::vector<int> severities;
    for (const auto& r : suite.per_severity) {
      if (std::find(severities.begin(), severities.end(), r.severity) == severities.end()) {
        severities.push_back(r.severity);
      }
    }
    std::sort(severities.begin(), severities.end());
    for (const auto& k : kinds) t2.columns.push_back(k.name());
    for (int sev : severities) {
      std::vector<Cell> row{Cell(std::int64_t{sev})};
      for (const auto& k : kinds) {
        const auto it = std::find_if(suite.per_severity.begin(), suite.per_severity.end(),
                                     [&](const auto& r) { return r.kind == k && r.severity == sev; });
        row.push_back(it == suite.per_severity.end() ? Cell{}
                                                     : str(report::format_fixed2(100.0 * it->auc)));
      }
      t2.add(std::move(row));
    }
    e.emit(t2);
    std::cout << report::to_csv(t2);
  }
}

// ---------------------------------------------------------------- calibrate

void run_calibrate(const Common& c, std::size_t bins) {
  const auto ens = load(c);
  const auto notions = parse_notions(c.notions);
  const auto tf = parse_transform_or_fail(c.transform);
  if (ens.labels_for(ens.manifest.id_split) == nullptr) {
    fail(ErrorCode::MissingLabels, "calibration needs labels for the ID split");
  }
  CalibrationConfig cfg{bins};
  const auto models = estimated_models(ens.manifest);

  Table points{"calibration",
               {"CACE: sum over classes and " + std::to_string(bins) +
                " equal-width bins of (n_bin / N) |mean confidence - frequency|, normalized by N "
                "(range [0, K]); averaged over models"},
               {"split", "cace", "notion", "agreement_r2", "accuracy_r2"},
               {}};
  std::map<Notion, std::vector<double>> x_cace;
  std::map<Notion, std::vector<double>> y_agree;
  std::map<Notion, std::vector<double>> y_acc;
  for (const auto& split : ens.manifest.ood_splits) {
    const auto* labels = ens.labels_for(split);
    if (labels == nullptr) continue;
    std::vector<const PredictionSet*> sets;
    for (const auto& m : models) sets.push_back(&ens.at(m, split));
    const double ec = ensemble_cace(sets, *labels, cfg);
    for (Notion n : notions) {
      const double ra = agreement_line(ens, split, n, tf).fit.r2;
      const double rc = accuracy_line(ens, split, n, tf).fit.r2;
      points.add({str(split), num(ec), str(std::string(to_string(n))), num(ra), num(rc)});
      x_cace[n].push_back(ec);
      y_agree[n].push_back(ra);
      y_acc[n].push_back(rc);
    }
  }
  if (points.rows.empty()) fail(ErrorCode::MissingLabels, "no OOD split has labels");

  Table trend{"calibration_trend",
              {"least-squares cubic R^2 = c0 + c1 cace + c2 cace^2 + c3 cace^3 per notion"},
              {"notion", "line", "c0", "c1", "c2", "c3"},
              {}};
  for (Notion n : notions) {
    if (x_cace[n].size() < 4) continue;
    for (const auto& [line, ys] : {std::pair{"agreement", &y_agree[n]}, std::pair{"accuracy", &y_acc[n]}}) {
      const auto cubic = polyfit3(x_cace[n], *ys);
      trend.add({str(std::string(to_string(n))), str(line), num(cubic.coef[0]), num(cubic.coef[1]),
                 num(cubic.coef[2]), num(cubic.coef[3])});
    }
  }
  Emitter e(c);
  e.emit(points);
  if (trend.rows.empty()) {
    std::cerr << "note: fewer than 4 labelled OOD splits, no trend fit\n";
  } else {
    e.emit(trend);
  }
}

// ---------------------------------------------------------------- synth

struct SynthOpts {
  SynthConfig cfg;
  bool planted = false;
  std::size_t planted_models = 6;
};

void run_synth(const Common& c, SynthOpts o) {
  const fs::path dir = c.out;
  if (fs::exists(dir / "manifest.json") && !c.force) {
    fail(ErrorCode::OutputExists, (dir / "manifest.json").string() + " exists (use --force)");
  }
  SynthWorld world = o.planted ? generate_planted_world(o.planted_models) : generate_world(o.cfg);
  std::string generator = o.planted ? "planted-line v1" : std::string(kSynthGenerator);
  if (!o.planted) generator += " seed=" + std::to_string(o.cfg.seed);
  const auto path = io::write_ensemble(world.ensemble, dir, generator);

  Table t{"models", {}, {"model", "skill", "temperature"}, {}};
  for (const auto& m : world.models) t.add({str(m.id), num(m.skill), num(m.temperature)});
  report::write_table(t, dir, {report::Format::Csv}, true);
  std::cout << "wrote " << path.generic_string() << "\n";
}

// ---------------------------------------------------------------- grid

struct GridOpts {
  int figure = 1;
  std::size_t resolution = 200;
  std::size_t label = 0;
};

void run_grid(const Common& c, const GridOpts& o) {
  const auto notions = parse_notions(c.notions);
  Emitter e(c);
  for (Notion n : notions) {
    const auto name = std::string(to_string(n));
    if (o.figure == 1) {
      Table anchor{"grid_fig1_" + name + "_anchor",
                   {"disagreement with the fixed distribution (0.35, 0.325, 0.325); p3 = 1 - p1 - p2"},
                   {"p1", "p2", "value"},
                   {}};
      for (const auto& p : simplex_grid(n, AgainstAnchor{}, o.resolution)) {
        anchor.add({num(p.p1), num(p.p2), num(p.value)});
      }
      Table err{"grid_fig1_" + name + "_error",
                {"error for true class " + std::to_string(o.label) + "; p3 = 1 - p1 - p2"},
                {"p1", "p2", "value"},
                {}};
      for (const auto& p : simplex_grid(n, ErrorForClass{o.label}, o.resolution)) {
        err.add({num(p.p1), num(p.p2), num(p.value)});
      }
      e.emit(anchor);
      e.emit(err);
    } else {
      Table curve{"grid_fig2_" + name, {"binary error for true class 0 at p = (t, 1 - t)"},
                  {"t", "value"}, {}};
      for (const auto& p : binary_error_curve(n, o.resolution)) curve.add({num(p.t), num(p.value)});
      e.emit(curve);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divdis: distributional model disagreement for OOD error estimation and detection"};
  app.name("divdis");
  app.require_subcommand(1);

  Common common;
  EstimateOpts est;
  DetectOpts det;
  SynthOpts syn;
  GridOpts grid;
  std::size_t bins = 15;

  auto* disagree = app.add_subcommand("disagree", "Mean pairwise disagreement per split and notion");
  add_common(disagree, common, true);
  add_notions(disagree, common);

  auto* error = app.add_subcommand("error", "Per-model error per labelled split and notion");
  add_common(error, common, true);
  add_notions(error, common);

  auto* line = app.add_subcommand("line", "Agreement- and accuracy-on-the-line fits per OOD split");
  add_common(line, common, true);
  add_notions(line, common);
  add_transform(line, common);

  auto* estimate = app.add_subcommand("estimate", "Unlabelled OOD error estimation (ALine-S / ALine-D)");
  add_common(estimate, common, true);
  add_notions(estimate, common);
  add_transform(estimate, common);
  estimate->add_option("--method", est.method,
                       "aline-s or aline-d (default: aline-d for all pairs, aline-s for an anchor)")
      ->check(CLI::IsMember({"aline-s", "aline-d"}));
  estimate->add_option("--r2-gate", est.r2_gate, "Admit splits whose agreement R^2 exceeds this")
      ->capture_default_str();
  estimate->add_option("--anchor-weight", est.anchor_weight, "ALine-D weight of per-model anchor rows")
      ->capture_default_str();
  estimate->add_flag("--table1", est.table1, "Also print a split x notion MAPE table");

  auto* detect = app.add_subcommand("detect", "ROC-AUC of per-sample OOD scores");
  add_common(detect, common, true);
  detect->add_option("--kinds", det.kinds,
                     "Scores: neg-msp, neg-maxlogit, pair-top1, pair-hd, pair-jsd, pair-kld")
      ->delimiter(',');
  detect->add_flag("--pooled", det.pooled, "Average scores over units before a single AUC");
  detect->add_flag("--table2", det.table2, "Also print a severity x score-kind AUC table");

  auto* calibrate = app.add_subcommand("calibrate", "Ensemble CACE vs on-the-line R^2 with cubic trends");
  add_common(calibrate, common, true);
  add_notions(calibrate, common);
  add_transform(calibrate, common);
  calibrate->add_option("--bins", bins, "Equal-width CACE bins")->check(CLI::Range(2, 1000))->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic ensemble with a manifest");
  synth->add_option("--out", common.out, "Output directory")->capture_default_str();
  synth->add_flag("--force", common.force, "Overwrite an existing manifest");
  synth->add_option("--seed", syn.cfg.seed, "Random seed")->capture_default_str();
  synth->add_option("--models", syn.cfg.n_models, "Number of models")->capture_default_str();
  synth->add_option("--samples", syn.cfg.n_samples, "Samples per split")->capture_default_str();
  synth->add_option("--classes", syn.cfg.n_classes, "Number of classes")->capture_default_str();
  synth->add_option("--skill-lo", syn.cfg.skill_lo, "Lower end of the skill range")->capture_default_str();
  synth->add_option("--skill-hi", syn.cfg.skill_hi, "Upper end of the skill range")->capture_default_str();
  synth->add_option("--temperature-lo", syn.cfg.temperature_lo, "Lower end of the temperature range")
      ->capture_default_str();
  synth->add_option("--temperature-hi", syn.cfg.temperature_hi, "Upper end of the temperature range")
      ->capture_default_str();
  synth->add_option("--id-noise", syn.cfg.id_noise, "Logit noise scale of the ID split")->capture_default_str();
  synth->add_option("--severities", syn.cfg.severities, "Logit noise scale per OOD split")
      ->delimiter(',')
      ->capture_default_str();
  synth->add_flag("--planted", syn.planted, "Write the exactly-linear two-class world instead");
  synth->add_option("--planted-models", syn.planted_models, "Models in the planted world (2-10)")
      ->capture_default_str();

  auto* gridcmd = app.add_subcommand("grid", "Simplex heatmap (figure 1) or binary error curve (figure 2) data");
  gridcmd->add_option("--out", common.out, "Output directory")->capture_default_str();
  gridcmd->add_option("--format", common.formats, "Report formats: csv, json")->delimiter(',')->capture_default_str();
  gridcmd->add_flag("--force", common.force, "Overwrite existing files");
  add_notions(gridcmd, common);
  gridcmd->add_option("--figure", grid.figure, "1: 3-class simplex grids, 2: binary error curves")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  gridcmd->add_option("--resolution", grid.resolution, "Grid steps per unit (>= 2)")->capture_default_str();
  gridcmd->add_option("--label", grid.label, "True class for the figure-1 error grid (0-2)")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*disagree) run_disagree(common);
    if (*error) run_error(common);
    if (*line) run_line(common);
    if (*estimate) run_estimate(common, est);
    if (*detect) run_detect(common, det);
    if (*calibrate) run_calibrate(common, bins);
    if (*synth) run_synth(common, syn);
    if (*gridcmd) run_grid(common, grid);
  } catch (const Error& e) {
    std::cerr << "divdis: " << e.what() << "\n";
    return is_numerical(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "divdis: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
