// csord: cost-sensitive ordinal classification toolkit.
//
// Subcommands: gen-data, train, sweep, eval, compare, cost-matrix.
// Every command writes a self-describing JSON report and prints a short
// human summary to stdout; exit code is 0 only when the report was
// fully written.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csord/bootstrap.hpp"
#include "csord/cost_matrices.hpp"
#include "csord/data_io.hpp"
#include "csord/errors.hpp"
#include "csord/metrics.hpp"
#include "csord/serialize.hpp"
#include "csord/trainer.hpp"

namespace {

using csord::json;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw csord::InvalidInputError("bad number '" + cell + "' in list");
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Fig.-3-style view of a confusion matrix: each row as integer percents
// of its row sum. Rows for grades absent from the data stay all zero.
json row_percent_confusion(const csord::ConfusionCounts& m) {
  json rows = json::array();
  for (int i = 0; i < m.num_classes; ++i) {
    json row = json::array();
    long long total = m.row_sum(i);
    for (int j = 0; j < m.num_classes; ++j) {
      row.push_back(total == 0
                        ? 0
                        : static_cast<int>(std::llround(100.0 * m.at(i, j) / total)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// gen-data

struct GenOpts {
  std::string out;
  std::string report;
  std::string priors;
  std::string noise_matrix;
  int samples = 1000;
  int num_classes = 5;
  int input_dim = 2;
  double spacing = 1.0;
  double spread = 1.0;
  std::uint32_t seed = 0;
};

int cmd_gen_data(const GenOpts& o) {
  Stopwatch clock;
  csord::SynthSpec spec;
  spec.num_classes = o.num_classes;
  spec.num_samples = o.samples;
  spec.input_dim = o.input_dim;
  spec.spacing = o.spacing;
  spec.spread = o.spread;
  spec.seed = o.seed;
  if (!o.priors.empty()) {
    spec.priors = parse_double_list(o.priors);
  } else if (o.num_classes == 5) {
    // Imbalanced default mimicking real grade frequencies.
    spec.priors = {0.73, 0.07, 0.15, 0.03, 0.02};
  }
  if (!o.noise_matrix.empty())
    spec.noise = csord::load_row_stochastic_csv(o.noise_matrix);

  csord::Dataset ds = csord::gen_synthetic(spec);
  csord::save_csv(ds, o.out);

  std::vector<int> counts(ds.num_classes, 0);
  for (int y : ds.labels) ++counts[y];

  json report;
  report["command"] = "gen-data";
  report["seed"] = o.seed;
  report["config"] = {{"num_classes", spec.num_classes},
                      {"samples", spec.num_samples},
                      {"input_dim", spec.input_dim},
                      {"priors", spec.priors.empty()
                                     ? json(nullptr)
                                     : json(spec.priors)},
                      {"spacing", spec.spacing},
                      {"spread", spec.spread},
                      {"noise_matrix", o.noise_matrix.empty()
                                           ? json(nullptr)
                                           : json(o.noise_matrix)}};
  report["artifacts"] = {{"data", o.out}};
  report["class_counts"] = counts;
  report["has_clean_labels"] = ds.has_clean_labels();
  report["wall_clock_seconds"] = clock.seconds();
  csord::save_json(report, o.report);

  std::cout << "wrote " << ds.num_rows << " rows (" << ds.num_features
            << " features, " << ds.num_classes << " classes) to " << o.out << "\n";
  std::cout << "class counts:";
  for (int c : counts) std::cout << " " << c;
  std::cout << "\nreport: " << o.report << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train / sweep

struct TrainOpts {
  std::string train_path, val_path, out_dir, config_path, report;
  std::string base, cost, confusion_path, cost_csv_path, model;
  double lambda = 0.0, lr = 0.0, plateau_factor = 0.0;
  double alpha = 0.0, gamma = 0.0, sigma = 0.0;
  int hidden_dim = 0, batch_size = 0, plateau_patience = 0;
  int early_stop = 0, max_epochs = 0;
  bool oversample = true;
  std::uint32_t seed = 0;

  CLI::Option* o_base = nullptr;
  CLI::Option* o_lambda = nullptr;
  CLI::Option* o_cost = nullptr;
  CLI::Option* o_confusion = nullptr;
  CLI::Option* o_cost_csv = nullptr;
  CLI::Option* o_model = nullptr;
  CLI::Option* o_hidden = nullptr;
  CLI::Option* o_batch = nullptr;
  CLI::Option* o_lr = nullptr;
  CLI::Option* o_pf = nullptr;
  CLI::Option* o_pp = nullptr;
  CLI::Option* o_es = nullptr;
  CLI::Option* o_me = nullptr;
  CLI::Option* o_over = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_gamma = nullptr;
  CLI::Option* o_sigma = nullptr;
  CLI::Option* o_seed = nullptr;
};

void add_train_options(CLI::App* sub, TrainOpts& o, bool with_lambda) {
  sub->add_option("--train", o.train_path, "training split CSV")->required();
  sub->add_option("--val", o.val_path, "validation split CSV")->required();
  sub->add_option("--out-dir", o.out_dir, "directory for checkpoint/history/report")
      ->required();
  sub->add_option("--config", o.config_path, "JSON config file (flags override it)");
  sub->add_option("--report", o.report, "report path (default <out-dir>/report.json)");
  o.o_base = sub->add_option("--base", o.base, "base loss: ce|fl|nuls");
  if (with_lambda)
    o.o_lambda = sub->add_option("--lambda", o.lambda, "regularizer weight (>= 0)");
  o.o_cost = sub->add_option("--cost-matrix", o.cost,
                             "cost matrix source: none|quadratic|ast|csv");
  o.o_confusion =
      sub->add_option("--confusion", o.confusion_path, "confusion counts CSV (ast)");
  o.o_cost_csv =
      sub->add_option("--cost-csv", o.cost_csv_path, "explicit cost matrix CSV (csv)");
  o.o_model = sub->add_option("--model", o.model, "model kind: linear|one_hidden");
  o.o_hidden = sub->add_option("--hidden-dim", o.hidden_dim, "hidden units");
  o.o_batch = sub->add_option("--batch-size", o.batch_size, "minibatch size");
  o.o_lr = sub->add_option("--lr", o.lr, "initial learning rate");
  o.o_pf = sub->add_option("--plateau-factor", o.plateau_factor, "lr divisor on plateau");
  o.o_pp = sub->add_option("--plateau-patience", o.plateau_patience,
                           "stagnant epochs before lr drop");
  o.o_es = sub->add_option("--early-stop-patience", o.early_stop,
                           "stagnant epochs before stopping");
  o.o_me = sub->add_option("--max-epochs", o.max_epochs, "epoch cap");
  o.o_over = sub->add_flag("--oversample,!--no-oversample", o.oversample,
                           "balance classes each epoch by resampling");
  o.o_alpha = sub->add_option("--alpha", o.alpha, "focal loss weight");
  o.o_gamma = sub->add_option("--gamma", o.gamma, "focal loss focusing exponent");
  o.o_sigma = sub->add_option("--sigma", o.sigma, "label smoothing width");
  o.o_seed = sub->add_option("--seed", o.seed, "RNG seed");
}

csord::TrainConfig resolve_train_config(const TrainOpts& o) {
  csord::TrainConfig cfg;
  if (!o.config_path.empty())
    cfg = csord::train_config_from_json(csord::load_json(o.config_path), cfg);

  json overrides = json::object();
  if (o.o_base && o.o_base->count()) overrides["base_loss"] = o.base;
  if (o.o_lambda && o.o_lambda->count()) overrides["lambda"] = o.lambda;
  if (o.o_cost && o.o_cost->count()) overrides["cost_matrix"] = o.cost;
  if (o.o_confusion && o.o_confusion->count()) overrides["cost_path"] = o.confusion_path;
  if (o.o_cost_csv && o.o_cost_csv->count()) overrides["cost_path"] = o.cost_csv_path;
  if (o.o_model && o.o_model->count()) overrides["model"] = o.model;
  if (o.o_hidden && o.o_hidden->count()) overrides["hidden_dim"] = o.hidden_dim;
  if (o.o_batch && o.o_batch->count()) overrides["batch_size"] = o.batch_size;
  if (o.o_lr && o.o_lr->count()) overrides["lr"] = o.lr;
  if (o.o_pf && o.o_pf->count()) overrides["plateau_factor"] = o.plateau_factor;
  if (o.o_pp && o.o_pp->count()) overrides["plateau_patience"] = o.plateau_patience;
  if (o.o_es && o.o_es->count()) overrides["early_stop_patience"] = o.early_stop;
  if (o.o_me && o.o_me->count()) overrides["max_epochs"] = o.max_epochs;
  if (o.o_over && o.o_over->count()) overrides["oversample"] = o.oversample;
  if (o.o_alpha && o.o_alpha->count()) overrides["alpha"] = o.alpha;
  if (o.o_gamma && o.o_gamma->count()) overrides["gamma"] = o.gamma;
  if (o.o_sigma && o.o_sigma->count()) overrides["sigma"] = o.sigma;
  if (o.o_seed && o.o_seed->count()) overrides["seed"] = o.seed;
  return csord::train_config_from_json(overrides, cfg);
}

void load_splits(const TrainOpts& o, csord::Dataset& train_ds, csord::Dataset& val_ds) {
  train_ds = csord::load_csv(o.train_path);
  val_ds = csord::load_csv(o.val_path);
  int c = std::max(train_ds.num_classes, val_ds.num_classes);
  train_ds.num_classes = c;
  val_ds.num_classes = c;
}

json base_report(const char* command, const csord::TrainConfig& cfg,
                 const TrainOpts& o, int num_classes) {
  json report;
  report["command"] = command;
  report["seed"] = cfg.seed;
  report["config"] = csord::to_json(cfg);
  report["data"] = {{"train", o.train_path}, {"val", o.val_path}};
  if (cfg.cost_source != csord::CostSource::None)
    report["cost_matrix_resolved"] =
        csord::to_json(*csord::resolve_cost_matrix(cfg, num_classes));
  return report;
}

int cmd_train(const TrainOpts& o) {
  Stopwatch clock;
  csord::TrainConfig cfg = resolve_train_config(o);
  csord::Dataset train_ds, val_ds;
  load_splits(o, train_ds, val_ds);

  csord::TrainResult result = csord::train(cfg, train_ds, val_ds);

  std::filesystem::create_directories(o.out_dir);
  std::string ckpt_path = o.out_dir + "/checkpoint.json";
  std::string hist_path = o.out_dir + "/history.jsonl";
  std::string report_path = o.report.empty() ? o.out_dir + "/report.json" : o.report;
  csord::save_checkpoint(
      {result.model, cfg, result.history.best_val_kappa}, ckpt_path);
  csord::save_history_jsonl(result.history, hist_path);

  json report = base_report("train", cfg, o, train_ds.num_classes);
  report["artifacts"] = {{"checkpoint", ckpt_path}, {"history", hist_path}};
  report["history"] = csord::to_json(result.history);
  report["wall_clock_seconds"] = clock.seconds();
  csord::save_json(report, report_path);

  std::cout << "trained " << result.history.epochs.size() << " epochs; best epoch "
            << result.history.best_epoch << " with val quad-kappa "
            << fmt(result.history.best_val_kappa) << "\n"
            << "checkpoint: " << ckpt_path << "\nreport: " << report_path << "\n";
  return 0;
}

int cmd_sweep(const TrainOpts& o) {
  Stopwatch clock;
  csord::TrainConfig cfg = resolve_train_config(o);
  csord::Dataset train_ds, val_ds;
  load_splits(o, train_ds, val_ds);

  std::map<double, csord::TrainResult> runs;
  csord::SweepResult sweep = csord::run_lambda_sweep([&](double lambda) {
    csord::TrainConfig c = cfg;
    c.lambda = lambda;
    try {
      csord::TrainResult r = csord::train(c, train_ds, val_ds);
      double kappa = r.history.best_val_kappa;
      runs.emplace(lambda, std::move(r));
      return kappa;
    } catch (const csord::TrainingDivergedError& e) {
      throw csord::Error("lambda " + fmt(lambda) + ": " + e.what());
    }
  });
  csord::TrainResult& best = runs.at(sweep.selected_lambda);
  csord::TrainConfig selected_cfg = cfg;
  selected_cfg.lambda = sweep.selected_lambda;

  std::filesystem::create_directories(o.out_dir);
  std::string ckpt_path = o.out_dir + "/checkpoint.json";
  std::string hist_path = o.out_dir + "/history.jsonl";
  std::string report_path = o.report.empty() ? o.out_dir + "/report.json" : o.report;
  csord::save_checkpoint(
      {best.model, selected_cfg, best.history.best_val_kappa}, ckpt_path);
  csord::save_history_jsonl(best.history, hist_path);

  json report = base_report("sweep", cfg, o, train_ds.num_classes);
  report["config"] = csord::to_json(selected_cfg);
  report["artifacts"] = {{"checkpoint", ckpt_path}, {"history", hist_path}};
  report["sweep"] = csord::to_json(sweep);
  report["wall_clock_seconds"] = clock.seconds();
  csord::save_json(report, report_path);

  for (const csord::SweepPoint& p : sweep.points)
    std::cout << "lambda " << fmt(p.lambda) << ": val quad-kappa "
              << fmt(p.val_kappa) << "\n";
  std::cout << "selected lambda " << fmt(sweep.selected_lambda)
            << "\ncheckpoint: " << ckpt_path << "\nreport: " << report_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string checkpoint, data, report = "eval_report.json";
};

int cmd_eval(const EvalOpts& o) {
  Stopwatch clock;
  csord::Checkpoint ckpt = csord::load_checkpoint(o.checkpoint);
  csord::Dataset ds = csord::load_csv(o.data, ckpt.model.num_classes);
  csord::PredictionSet preds = csord::predict(ckpt.model, ds);
  csord::MetricsReport metrics = csord::compute_metrics(preds);

  json report;
  report["command"] = "eval";
  report["seed"] = ckpt.config.seed;
  report["config"] = csord::to_json(ckpt.config);
  report["checkpoint"] = o.checkpoint;
  report["data"] = o.data;
  report["metrics"] = csord::to_json(metrics);
  report["confusion_row_percent"] = row_percent_confusion(metrics.confusion);
  report["absent_grades"] = csord::absent_grades(metrics.confusion);
  report["wall_clock_seconds"] = clock.seconds();
  csord::save_json(report, o.report);

  std::cout << "quad_kappa " << fmt(metrics.quad_kappa) << "\naca "
            << fmt(metrics.aca) << "\nmauc "
            << (metrics.mauc ? fmt(*metrics.mauc) : "undefined") << "\nkendall_tau "
            << (metrics.kendall_tau ? fmt(*metrics.kendall_tau) : "undefined")
            << "\nreport: " << o.report << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareOpts {
  std::string checkpoint_a, checkpoint_b, data, report = "compare_report.json";
  int n_resamples = 1000;
  double alpha = 0.05;
  std::uint32_t seed = 0;
};

int cmd_compare(const CompareOpts& o) {
  Stopwatch clock;
  csord::Checkpoint a = csord::load_checkpoint(o.checkpoint_a);
  csord::Checkpoint b = csord::load_checkpoint(o.checkpoint_b);
  if (a.model.num_classes != b.model.num_classes)
    throw csord::InvalidDimensionError("checkpoints disagree on num_classes");
  csord::Dataset ds = csord::load_csv(o.data, a.model.num_classes);
  csord::PredictionSet pa = csord::predict(a.model, ds);
  csord::PredictionSet pb = csord::predict(b.model, ds);

  json results = json::array();
  std::ostringstream summary;
  for (csord::MetricKind kind :
       {csord::MetricKind::QuadKappa, csord::MetricKind::MAuc, csord::MetricKind::Aca,
        csord::MetricKind::KendallTau}) {
    csord::BootstrapResult r = csord::paired_bootstrap_test(
        pa.truths, pa.probs, pb.probs, pa.num_classes, kind, o.n_resamples, o.alpha,
        o.seed);
    summary << r.metric << ": diff " << fmt(r.observed_diff) << " CI ["
            << fmt(r.ci_lo) << ", " << fmt(r.ci_hi) << "] p " << fmt(r.p_value)
            << (r.significant ? " (significant)" : " (not significant)") << "\n";
    results.push_back(csord::to_json(r));
  }

  json report;
  report["command"] = "compare";
  report["seed"] = o.seed;
  report["checkpoint_a"] = o.checkpoint_a;
  report["checkpoint_b"] = o.checkpoint_b;
  report["data"] = o.data;
  report["n_resamples"] = o.n_resamples;
  report["alpha"] = o.alpha;
  report["results"] = results;
  report["wall_clock_seconds"] = clock.seconds();
  csord::save_json(report, o.report);

  std::cout << summary.str() << "report: " << o.report << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// cost-matrix

struct CostOpts {
  std::string kind, confusion, out, report = "cost_matrix_report.json";
  int num_classes = 5;
};

int cmd_cost_matrix(const CostOpts& o) {
  Stopwatch clock;
  json matrix_json;
  std::vector<double> flat;
  int c = 0;
  if (o.kind == "quadratic") {
    csord::CostMatrix m = csord::quadratic_cost_matrix(o.num_classes);
    if (!o.out.empty()) csord::save_csv(m, o.out);
    matrix_json = csord::to_json(m);
    flat = m.costs;
    c = m.num_classes;
  } else if (o.kind == "normalize") {
    csord::RowStochastic m =
        csord::row_normalize(csord::load_confusion_csv(o.confusion));
    if (!o.out.empty()) csord::save_csv(m, o.out);
    matrix_json = csord::to_json(m);
    flat = m.probs;
    c = m.num_classes;
  } else if (o.kind == "ast") {
    csord::CostMatrix m = csord::ast_cost_matrix(csord::load_confusion_csv(o.confusion));
    if (!o.out.empty()) csord::save_csv(m, o.out);
    matrix_json = csord::to_json(m);
    flat = m.costs;
    c = m.num_classes;
  } else {
    throw csord::InvalidInputError("unknown kind '" + o.kind +
                                   "' (want quadratic|normalize|ast)");
  }

  json report;
  report["command"] = "cost-matrix";
  report["seed"] = 0;
  report["kind"] = o.kind;
  if (!o.confusion.empty()) report["confusion"] = o.confusion;
  if (!o.out.empty()) report["artifacts"] = {{"matrix_csv", o.out}};
  report["matrix"] = matrix_json;
  report["wall_clock_seconds"] = clock.seconds();
  csord::save_json(report, o.report);

  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < c; ++j)
      std::cout << (j ? " " : "") << fmt(flat[static_cast<std::size_t>(i) * c + j]);
    std::cout << "\n";
  }
  std::cout << "report: " << o.report << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cost-sensitive ordinal classification toolkit"};
  app.require_subcommand(1);

  GenOpts gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "generate synthetic ordinal data");
  gen_cmd->add_option("--out", gen.out, "output CSV path")->required();
  gen_cmd->add_option("--report", gen.report, "report path")->required(false);
  gen_cmd->add_option("--samples", gen.samples, "number of rows");
  gen_cmd->add_option("--num-classes", gen.num_classes, "number of grades");
  gen_cmd->add_option("--input-dim", gen.input_dim, "feature dimension");
  gen_cmd->add_option("--priors", gen.priors,
                      "comma-separated class priors (default: imbalanced for 5 "
                      "classes, else uniform)");
  gen_cmd->add_option("--spacing", gen.spacing, "gap between adjacent class means");
  gen_cmd->add_option("--spread", gen.spread, "per-class stddev");
  gen_cmd->add_option("--noise-matrix", gen.noise_matrix,
                      "row-stochastic label corruption CSV");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");

  TrainOpts train_opts;
  CLI::App* train_cmd = app.add_subcommand("train", "train one configuration");
  add_train_options(train_cmd, train_opts, true);

  TrainOpts sweep_opts;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "lambda sweep with automatic extension");
  add_train_options(sweep_cmd, sweep_opts, false);

  EvalOpts eval_opts;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint, "checkpoint JSON")
      ->required();
  eval_cmd->add_option("--data", eval_opts.data, "dataset CSV")->required();
  eval_cmd->add_option("--report", eval_opts.report, "report path");

  CompareOpts cmp;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "paired bootstrap comparison");
  cmp_cmd->add_option("--checkpoint-a", cmp.checkpoint_a, "checkpoint A")->required();
  cmp_cmd->add_option("--checkpoint-b", cmp.checkpoint_b, "checkpoint B")->required();
  cmp_cmd->add_option("--data", cmp.data, "dataset CSV")->required();
  cmp_cmd->add_option("--n", cmp.n_resamples, "bootstrap resamples");
  cmp_cmd->add_option("--alpha", cmp.alpha, "significance level");
  cmp_cmd->add_option("--seed", cmp.seed, "RNG seed");
  cmp_cmd->add_option("--report", cmp.report, "report path");

  CostOpts cost;
  CLI::App* cost_cmd =
      app.add_subcommand("cost-matrix", "build quadratic/normalized/ast matrices");
  cost_cmd->add_option("--kind", cost.kind, "quadratic|normalize|ast")->required();
  cost_cmd->add_option("--num-classes", cost.num_classes, "grades (quadratic)");
  cost_cmd->add_option("--confusion", cost.confusion, "confusion counts CSV");
  cost_cmd->add_option("--out", cost.out, "also write the matrix as CSV");
  cost_cmd->add_option("--report", cost.report, "report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen_cmd->parsed()) {
      if (gen.report.empty()) gen.report = gen.out + ".report.json";
      return cmd_gen_data(gen);
    }
    if (train_cmd->parsed()) return cmd_train(train_opts);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts);
    if (eval_cmd->parsed()) return cmd_eval(eval_opts);
    if (cmp_cmd->parsed()) return cmd_compare(cmp);
    if (cost_cmd->parsed()) return cmd_cost_matrix(cost);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
