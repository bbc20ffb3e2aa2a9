#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "csord/cost_matrices.hpp"
#include "csord/data_io.hpp"
#include "csord/serialize.hpp"
#include "csord/trainer.hpp"
#include "test_util.hpp"

using namespace csord;

namespace {

// Run the installed binary with the given arguments, capturing combined
// stdout/stderr into `log_path`; returns the process exit code.
int run_cli(const std::string& args, const std::string& log_path) {
  std::string cmd = std::string(CSORD_CLI_PATH) + " " + args + " > " +
                    log_path + " 2>&1";
  int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Dataset blob_data(int n, int c, std::uint32_t seed) {
  SynthSpec spec;
  spec.num_classes = c;
  spec.num_samples = n;
  spec.input_dim = 2;
  spec.spacing = 1.5;
  spec.spread = 1.0;
  spec.seed = seed;
  return gen_synthetic(spec);
}

// Dataset whose features are a one-hot encoding of the label, plus a
// linear checkpoint reading it off through `weights(k, d)`.
void write_onehot_fixture(const testutil::TempDir& dir, int n, int c,
                          const std::string& data_name) {
  Dataset ds;
  ds.num_rows = n;
  ds.num_features = c;
  ds.num_classes = c;
  for (int i = 0; i < n; ++i) {
    int y = i % c;
    ds.labels.push_back(y);
    for (int d = 0; d < c; ++d) ds.features.push_back(d == y ? 1.0 : 0.0);
  }
  save_csv(ds, dir.file(data_name));
}

void write_linear_checkpoint(const testutil::TempDir& dir, int c,
                             const std::string& name,
                             const std::function<double(int, int)>& weights) {
  Checkpoint ckpt;
  ckpt.model.kind = ModelKind::Linear;
  ckpt.model.input_dim = c;
  ckpt.model.num_classes = c;
  ckpt.model.w_out.assign(static_cast<std::size_t>(c) * c, 0.0);
  ckpt.model.b_out.assign(c, 0.0);
  for (int k = 0; k < c; ++k)
    for (int d = 0; d < c; ++d) ckpt.model.w_out[static_cast<std::size_t>(k) * c + d] = weights(k, d);
  save_checkpoint(ckpt, dir.file(name));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen-data is reproducible and reports its configuration") {
  testutil::TempDir dir("cli_gen");
  std::string a = dir.file("a.csv"), b = dir.file("b.csv");
  CHECK(run_cli("gen-data --out " + a + " --samples 400 --seed 7",
                dir.file("log1")) == 0);
  CHECK(run_cli("gen-data --out " + b + " --samples 400 --seed 7",
                dir.file("log2")) == 0);
  CHECK(testutil::read_file(a) == testutil::read_file(b));

  json report = load_json(a + ".report.json");
  CHECK(report["command"] == "gen-data");
  CHECK(report["seed"] == 7);
  CHECK(report["config"]["samples"] == 400);
  CHECK(report["config"]["num_classes"] == 5);
  // five-class default priors are the imbalanced ones
  CHECK(report["config"]["priors"][0] == 0.73);
  CHECK(report["has_clean_labels"] == false);
  int total = 0;
  for (const auto& c : report["class_counts"]) total += c.get<int>();
  CHECK(total == 400);
  CHECK(report.contains("wall_clock_seconds"));

  std::string c = dir.file("c.csv");
  CHECK(run_cli("gen-data --out " + c + " --samples 400 --seed 8",
                dir.file("log3")) == 0);
  CHECK(testutil::read_file(a) != testutil::read_file(c));
}

TEST_CASE("gen-data rejects inconsistent priors") {
  testutil::TempDir dir("cli_gen_bad");
  CHECK(run_cli("gen-data --out " + dir.file("x.csv") + " --priors 0.4,0.5",
                dir.file("log")) != 0);
  std::string log = testutil::read_file(dir.file("log"));
  CHECK(log.find("error:") != std::string::npos);
}

TEST_CASE("gen-data with a noise matrix emits clean labels") {
  testutil::TempDir dir("cli_gen_noise");
  std::string conf = dir.file("m_opht.csv");
  testutil::write_file(conf, testutil::m_opht_csv());
  std::string mstar = dir.file("mstar.csv");
  save_csv(row_normalize(load_confusion_csv(conf)), mstar);

  std::string out = dir.file("noisy.csv");
  CHECK(run_cli("gen-data --out " + out + " --samples 300 --seed 11" +
                    " --noise-matrix " + mstar,
                dir.file("log")) == 0);
  Dataset ds = load_csv(out);
  CHECK(ds.has_clean_labels());
  json report = load_json(out + ".report.json");
  CHECK(report["has_clean_labels"] == true);
  CHECK(report["config"]["noise_matrix"] == mstar);
}

TEST_CASE("train writes checkpoint, history and report") {
  testutil::TempDir dir("cli_train");
  save_csv(blob_data(150, 3, 1), dir.file("train.csv"));
  save_csv(blob_data(60, 3, 2), dir.file("val.csv"));
  std::string out_dir = dir.file("run");
  CHECK(run_cli("train --train " + dir.file("train.csv") + " --val " +
                    dir.file("val.csv") + " --out-dir " + out_dir +
                    " --max-epochs 4 --seed 3 --lambda 0",
                dir.file("log")) == 0);

  json report = load_json(out_dir + "/report.json");
  CHECK(report["command"] == "train");
  CHECK(report["config"]["cost_matrix"] == "none");
  CHECK(report["config"]["lambda"] == 0.0);
  CHECK(report["config"]["max_epochs"] == 4);
  CHECK_FALSE(report.contains("cost_matrix_resolved"));
  CHECK(report["history"]["epochs"].size() >= 1);
  CHECK(report["history"]["epochs"].size() <= 4);

  Checkpoint ckpt = load_checkpoint(out_dir + "/checkpoint.json");
  CHECK(ckpt.config.max_epochs == 4);
  CHECK(ckpt.config.seed == 3);
  CHECK(ckpt.model.num_classes == 3);
  CHECK(ckpt.best_val_kappa == report["history"]["best_val_kappa"].get<double>());

  std::string hist = testutil::read_file(out_dir + "/history.jsonl");
  int lines = 0;
  for (char ch : hist) lines += ch == '\n';
  CHECK(lines == static_cast<int>(report["history"]["epochs"].size()));

  std::string log = testutil::read_file(dir.file("log"));
  CHECK(log.find("best epoch") != std::string::npos);
}

TEST_CASE("train embeds the resolved cost matrix") {
  testutil::TempDir dir("cli_train_ast");
  save_csv(blob_data(300, 5, 5), dir.file("train.csv"));
  save_csv(blob_data(150, 5, 6), dir.file("val.csv"));
  std::string conf = dir.file("m_opht.csv");
  testutil::write_file(conf, testutil::m_opht_csv());
  std::string out_dir = dir.file("run");
  CHECK(run_cli("train --train " + dir.file("train.csv") + " --val " +
                    dir.file("val.csv") + " --out-dir " + out_dir +
                    " --max-epochs 3 --seed 4 --base nuls --lambda 1" +
                    " --cost-matrix ast --confusion " + conf,
                dir.file("log")) == 0);
  json report = load_json(out_dir + "/report.json");
  CHECK(report["config"]["base_loss"] == "nuls");
  CHECK(report["config"]["cost_matrix"] == "ast");
  REQUIRE(report.contains("cost_matrix_resolved"));
  CHECK(report["cost_matrix_resolved"]["num_classes"] == 5);
  CHECK(report["cost_matrix_resolved"]["matrix"][0][4] == 8.0);
}

TEST_CASE("train runs are byte-identical under a fixed seed") {
  testutil::TempDir dir("cli_train_det");
  save_csv(blob_data(150, 3, 9), dir.file("train.csv"));
  save_csv(blob_data(60, 3, 10), dir.file("val.csv"));
  std::string common = "train --train " + dir.file("train.csv") + " --val " +
                       dir.file("val.csv") +
                       " --max-epochs 5 --seed 12 --lambda 0.5" +
                       " --cost-matrix quadratic --out-dir ";
  CHECK(run_cli(common + dir.file("run1"), dir.file("log1")) == 0);
  CHECK(run_cli(common + dir.file("run2"), dir.file("log2")) == 0);
  CHECK(testutil::read_file(dir.file("run1") + "/checkpoint.json") ==
        testutil::read_file(dir.file("run2") + "/checkpoint.json"));
  CHECK(testutil::read_file(dir.file("run1") + "/history.jsonl") ==
        testutil::read_file(dir.file("run2") + "/history.jsonl"));
  json r1 = load_json(dir.file("run1") + "/report.json");
  json r2 = load_json(dir.file("run2") + "/report.json");
  r1.erase("wall_clock_seconds");
  r2.erase("wall_clock_seconds");
  r1.erase("artifacts");
  r2.erase("artifacts");
  CHECK(r1 == r2);
}

TEST_CASE("config file plus flag overrides") {
  testutil::TempDir dir("cli_config");
  save_csv(blob_data(150, 3, 13), dir.file("train.csv"));
  save_csv(blob_data(60, 3, 14), dir.file("val.csv"));
  save_json(json{{"max_epochs", 3}, {"lr", 0.5}, {"seed", 9}},
            dir.file("config.json"));
  std::string out_dir = dir.file("run");
  CHECK(run_cli("train --train " + dir.file("train.csv") + " --val " +
                    dir.file("val.csv") + " --out-dir " + out_dir +
                    " --config " + dir.file("config.json") + " --lr 0.25",
                dir.file("log")) == 0);
  json report = load_json(out_dir + "/report.json");
  CHECK(report["config"]["max_epochs"] == 3);  // from the file
  CHECK(report["config"]["lr"] == 0.25);       // flag wins
  CHECK(report["config"]["seed"] == 9);

  save_json(json{{"epochs_max", 3}}, dir.file("bad.json"));
  CHECK(run_cli("train --train " + dir.file("train.csv") + " --val " +
                    dir.file("val.csv") + " --out-dir " + out_dir +
                    " --config " + dir.file("bad.json"),
                dir.file("log2")) != 0);
}

TEST_CASE("eval reports all four metrics on healthy data") {
  testutil::TempDir dir("cli_eval");
  save_csv(blob_data(150, 3, 21), dir.file("train.csv"));
  save_csv(blob_data(60, 3, 22), dir.file("val.csv"));
  std::string out_dir = dir.file("run");
  REQUIRE(run_cli("train --train " + dir.file("train.csv") + " --val " +
                      dir.file("val.csv") + " --out-dir " + out_dir +
                      " --max-epochs 6 --seed 2",
                  dir.file("log1")) == 0);
  std::string report_path = dir.file("eval.json");
  CHECK(run_cli("eval --checkpoint " + out_dir + "/checkpoint.json --data " +
                    dir.file("train.csv") + " --report " + report_path,
                dir.file("log2")) == 0);
  json report = load_json(report_path);
  CHECK(report["command"] == "eval");
  json m = report["metrics"];
  CHECK(m["quad_kappa"].get<double>() >= -1.0);
  CHECK(m["quad_kappa"].get<double>() <= 1.0);
  CHECK(m["aca"].get<double>() >= 0.0);
  CHECK(m["aca"].get<double>() <= 1.0);
  CHECK(m["mauc"].is_number());
  CHECK(m["kendall_tau"].is_number());
  CHECK(report["absent_grades"].empty());
  // the percent view rows each total ~100
  for (const auto& row : report["confusion_row_percent"]) {
    int sum = 0;
    for (const auto& cell : row) sum += cell.get<int>();
    CHECK(sum >= 98);
    CHECK(sum <= 102);
  }
  std::string log = testutil::read_file(dir.file("log2"));
  CHECK(log.find("quad_kappa") != std::string::npos);
}

TEST_CASE("eval on a perfect predictor maxes every metric") {
  testutil::TempDir dir("cli_eval_perfect");
  write_onehot_fixture(dir, 90, 3, "data.csv");
  write_linear_checkpoint(dir, 3, "perfect.json",
                          [](int k, int d) { return k == d ? 10.0 : 0.0; });
  std::string report_path = dir.file("eval.json");
  CHECK(run_cli("eval --checkpoint " + dir.file("perfect.json") + " --data " +
                    dir.file("data.csv") + " --report " + report_path,
                dir.file("log")) == 0);
  json m = load_json(report_path)["metrics"];
  CHECK(m["quad_kappa"] == 1.0);
  CHECK(m["aca"] == 1.0);
  CHECK(m["mauc"] == 1.0);
  CHECK(m["kendall_tau"] == 1.0);
}

TEST_CASE("eval reports undefined metrics as null and still exits 0") {
  testutil::TempDir dir("cli_eval_flat");
  write_onehot_fixture(dir, 60, 3, "data.csv");
  write_linear_checkpoint(dir, 3, "flat.json", [](int, int) { return 0.0; });
  std::string report_path = dir.file("eval.json");
  CHECK(run_cli("eval --checkpoint " + dir.file("flat.json") + " --data " +
                    dir.file("data.csv") + " --report " + report_path,
                dir.file("log")) == 0);
  json m = load_json(report_path)["metrics"];
  CHECK(m["kendall_tau"].is_null());   // constant argmax prediction
  CHECK(m["mauc"] == 0.5);             // all scores tie
  std::string log = testutil::read_file(dir.file("log"));
  CHECK(log.find("undefined") != std::string::npos);
}

TEST_CASE("compare of a checkpoint against itself is null everywhere") {
  testutil::TempDir dir("cli_cmp_self");
  write_onehot_fixture(dir, 90, 3, "data.csv");
  write_linear_checkpoint(dir, 3, "a.json",
                          [](int k, int d) { return k == d ? 10.0 : 0.0; });
  std::string report_path = dir.file("cmp.json");
  CHECK(run_cli("compare --checkpoint-a " + dir.file("a.json") +
                    " --checkpoint-b " + dir.file("a.json") + " --data " +
                    dir.file("data.csv") + " --n 100 --report " + report_path,
                dir.file("log")) == 0);
  json report = load_json(report_path);
  REQUIRE(report["results"].size() == 4);
  std::vector<std::string> want = {"quad_kappa", "mauc", "aca", "kendall_tau"};
  for (std::size_t i = 0; i < 4; ++i) {
    const json& r = report["results"][i];
    CHECK(r["metric"] == want[i]);
    CHECK(r["observed_diff"] == 0.0);
    CHECK(r["p_value"] == 1.0);
    CHECK(r["significant"] == false);
  }
}

TEST_CASE("compare separates a perfect and a mirrored grader") {
  testutil::TempDir dir("cli_cmp_diff");
  write_onehot_fixture(dir, 90, 3, "data.csv");
  write_linear_checkpoint(dir, 3, "good.json",
                          [](int k, int d) { return k == d ? 10.0 : 0.0; });
  write_linear_checkpoint(dir, 3, "anti.json",
                          [](int k, int d) { return k == 2 - d ? 10.0 : 0.0; });
  std::string report_path = dir.file("cmp.json");
  CHECK(run_cli("compare --checkpoint-a " + dir.file("good.json") +
                    " --checkpoint-b " + dir.file("anti.json") + " --data " +
                    dir.file("data.csv") + " --n 200 --seed 5 --report " +
                    report_path,
                dir.file("log")) == 0);
  json report = load_json(report_path);
  const json& kappa = report["results"][0];
  CHECK(kappa["metric"] == "quad_kappa");
  CHECK(kappa["observed_diff"] == 2.0);
  CHECK(kappa["p_value"].get<double>() < 0.05);
  CHECK(kappa["significant"] == true);
  CHECK(report["n_resamples"] == 200);

  // same seed, same answer
  std::string again = dir.file("cmp2.json");
  CHECK(run_cli("compare --checkpoint-a " + dir.file("good.json") +
                    " --checkpoint-b " + dir.file("anti.json") + " --data " +
                    dir.file("data.csv") + " --n 200 --seed 5 --report " + again,
                dir.file("log2")) == 0);
  json r1 = load_json(report_path), r2 = load_json(again);
  r1.erase("wall_clock_seconds");
  r2.erase("wall_clock_seconds");
  CHECK(r1 == r2);
}

TEST_CASE("sweep lists every lambda and stores the winner") {
  testutil::TempDir dir("cli_sweep");
  save_csv(blob_data(150, 3, 31), dir.file("train.csv"));
  save_csv(blob_data(60, 3, 32), dir.file("val.csv"));
  std::string out_dir = dir.file("run");
  CHECK(run_cli("sweep --train " + dir.file("train.csv") + " --val " +
                    dir.file("val.csv") + " --out-dir " + out_dir +
                    " --cost-matrix quadratic --max-epochs 3" +
                    " --early-stop-patience 2 --seed 6",
                dir.file("log")) == 0);
  json report = load_json(out_dir + "/report.json");
  CHECK(report["command"] == "sweep");
  const json& sweep = report["sweep"];
  REQUIRE(sweep["points"].size() >= 3);
  CHECK(sweep["points"][0]["lambda"] == 0.0);
  CHECK(sweep["points"][1]["lambda"] == 0.1);
  CHECK(sweep["points"][2]["lambda"] == 1.0);
  double selected = sweep["selected_lambda"].get<double>();
  bool found = false;
  for (const auto& p : sweep["points"]) {
    if (p["lambda"].get<double>() == selected) found = true;
    CHECK(p.contains("val_kappa"));
  }
  CHECK(found);
  CHECK(report["config"]["lambda"] == selected);

  Checkpoint ckpt = load_checkpoint(out_dir + "/checkpoint.json");
  CHECK(ckpt.config.lambda == selected);

  std::string log = testutil::read_file(dir.file("log"));
  CHECK(log.find("selected lambda") != std::string::npos);
  CHECK(log.find("lambda 0:") != std::string::npos);
}

TEST_CASE("cost-matrix subcommand") {
  testutil::TempDir dir("cli_cost");
  std::string conf = dir.file("m_opht.csv");
  testutil::write_file(conf, testutil::m_opht_csv());

  std::string rq = dir.file("quad.json");
  std::string out_csv = dir.file("quad.csv");
  CHECK(run_cli("cost-matrix --kind quadratic --num-classes 5 --out " + out_csv +
                    " --report " + rq,
                dir.file("log1")) == 0);
  json quad = load_json(rq);
  CHECK(quad["matrix"]["num_classes"] == 5);
  CHECK(quad["matrix"]["matrix"][0][4] == 16.0);
  CHECK(load_cost_csv(out_csv).at(0, 2) == 4.0);
  std::string log1 = testutil::read_file(dir.file("log1"));
  CHECK(log1.find("0 1 4 9 16") != std::string::npos);

  std::string rn = dir.file("norm.json");
  CHECK(run_cli("cost-matrix --kind normalize --confusion " + conf +
                    " --report " + rn,
                dir.file("log2")) == 0);
  CHECK(load_json(rn)["matrix"]["matrix"][4][3] == 0.0625);

  std::string ra = dir.file("ast.json");
  CHECK(run_cli("cost-matrix --kind ast --confusion " + conf + " --report " + ra,
                dir.file("log3")) == 0);
  CHECK(load_json(ra)["matrix"]["matrix"][0][4] == 8.0);

  CHECK(run_cli("cost-matrix --kind manhattan", dir.file("log4")) != 0);
  CHECK(run_cli("cost-matrix --kind ast", dir.file("log5")) != 0);
}

TEST_CASE("failures exit nonzero with a diagnostic") {
  testutil::TempDir dir("cli_fail");
  CHECK(run_cli("", dir.file("log1")) != 0);  // a subcommand is required
  CHECK(run_cli("train --train nope.csv --val nope.csv --out-dir " +
                    dir.file("x"),
                dir.file("log2")) != 0);
  CHECK(testutil::read_file(dir.file("log2")).find("error:") !=
        std::string::npos);
  CHECK(run_cli("eval --checkpoint nope.json --data nope.csv --report " +
                    dir.file("r.json"),
                dir.file("log3")) != 0);
  CHECK(run_cli("gen-data --out " + dir.file("d.csv") + " --bogus-flag 1",
                dir.file("log4")) != 0);
}

}  // TEST_SUITE
