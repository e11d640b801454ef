#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct TempPath {
  std::string path;
  explicit TempPath(const std::string& name)
      : path("/tmp/immigrate_cli_" + name) {}
  ~TempPath() { std::remove(path.c_str()); }
};

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

RunResult run_cli(const std::string& args) {
  TempPath out("stdout.txt");
  TempPath err("stderr.txt");
  const std::string cmd = std::string(IMMIGRATE_CLI_PATH) + " " + args + " >" +
                          out.path + " 2>" + err.path;
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out.path);
  result.err = slurp(err.path);
  return result;
}

int line_count(const std::string& text) {
  int lines = 0;
  for (char c : text) lines += c == '\n';
  return lines;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("synth writes a header plus two rows per class, reproducibly") {
  TempPath csv("synth.csv");
  const auto run =
      run_cli("synth --n 100 --noise 0.10 --seed 7 --out " + csv.path);
  REQUIRE(run.code == 0);

  const std::string first = slurp(csv.path);
  CHECK(line_count(first) == 201);
  CHECK(first.rfind("f1,f2,class", 0) == 0);

  REQUIRE(run_cli("synth --n 100 --noise 0.10 --seed 7 --out " + csv.path)
              .code == 0);
  CHECK(slurp(csv.path) == first);
}

TEST_CASE("train prints accuracy and predict writes one row per query") {
  TempPath csv("roundtrip.csv");
  TempPath model("roundtrip_model.json");
  TempPath preds("roundtrip_preds.csv");
  REQUIRE(run_cli("synth --n 30 --noise 0.10 --seed 3 --out " + csv.path)
              .code == 0);

  const auto trained =
      run_cli("train --data " + csv.path +
              " --label class --learner immigrate --sigma 1 --out " + model.path);
  REQUIRE(trained.code == 0);
  CHECK(contains(trained.out, "training accuracy: 0."));
  CHECK(contains(trained.out, "(60 instances)"));

  const auto predicted = run_cli("predict --model " + model.path + " --data " +
                                 csv.path + " --out " + preds.path);
  REQUIRE(predicted.code == 0);
  const std::string written = slurp(preds.path);
  CHECK(line_count(written) == 61);
  CHECK(written.rfind("prediction\n", 0) == 0);
  for (char c : written.substr(11))
    CHECK((c == '0' || c == '1' || c == '\n'));

  // Retraining with identical flags reproduces the model file byte for byte.
  TempPath again("roundtrip_model2.json");
  REQUIRE(run_cli("train --data " + csv.path +
                  " --label class --learner immigrate --sigma 1 --out " +
                  again.path)
              .code == 0);
  CHECK(slurp(again.path) == slurp(model.path));
}

TEST_CASE("predict matches query columns by name, not position") {
  TempPath csv("colorder.csv");
  TempPath model("colorder_model.json");
  REQUIRE(run_cli("synth --n 20 --seed 5 --out " + csv.path).code == 0);
  REQUIRE(run_cli("train --data " + csv.path + " --label class --out " +
                  model.path)
              .code == 0);

  TempPath forward("colorder_fwd.csv");
  TempPath reversed("colorder_rev.csv");
  {
    std::ofstream f(forward.path);
    f << "f1,f2\n4.1,2.2\n6.3,-0.5\n1.9,4.4\n";
    std::ofstream r(reversed.path);
    r << "f2,extra,f1\n2.2,9,4.1\n-0.5,9,6.3\n4.4,9,1.9\n";
  }
  TempPath out_fwd("colorder_pf.csv");
  TempPath out_rev("colorder_pr.csv");
  REQUIRE(run_cli("predict --model " + model.path + " --data " + forward.path +
                  " --out " + out_fwd.path)
              .code == 0);
  REQUIRE(run_cli("predict --model " + model.path + " --data " + reversed.path +
                  " --out " + out_rev.path)
              .code == 0);
  CHECK(slurp(out_fwd.path) == slurp(out_rev.path));

  TempPath headless("colorder_missing.csv");
  {
    std::ofstream h(headless.path);
    h << "f1,g2\n4.1,2.2\n";
  }
  const auto missing = run_cli("predict --model " + model.path + " --data " +
                               headless.path + " --out " + out_fwd.path);
  CHECK(missing.code == 1);
  CHECK(contains(missing.err, "no column 'f2'"));
}

TEST_CASE("cv reports k times repeats trials in a reloadable report") {
  TempPath csv("cv.csv");
  TempPath report("cv_report.json");
  REQUIRE(run_cli("synth --n 30 --noise 0.10 --seed 11 --out " + csv.path)
              .code == 0);

  const auto run = run_cli("cv --data " + csv.path +
                           " --label class --learner relief --k 3 --repeats 2 "
                           "--seed 1 --out " +
                           report.path);
  REQUIRE(run.code == 0);
  CHECK(contains(run.out, "over 6 trials"));
  CHECK(contains(run.out, "[relief]"));

  std::ifstream in(report.path);
  const nlohmann::json doc = nlohmann::json::parse(in);
  CHECK(doc.at("learner") == "relief");
  CHECK(doc.at("k") == 3);
  CHECK(doc.at("repeats") == 2);
  CHECK(doc.at("seed") == 1);
  REQUIRE(doc.at("accuracies").size() == 6);
  for (const auto& a : doc.at("accuracies")) {
    CHECK(a.get<double>() >= 0.0);
    CHECK(a.get<double>() <= 1.0);
  }
}

TEST_CASE("compare swaps win and loss with its arguments") {
  TempPath rep_a("cmp_a.json");
  TempPath rep_b("cmp_b.json");
  const auto write_report = [](const std::string& path, const std::string& name,
                               const std::vector<double>& acc) {
    nlohmann::json doc;
    doc["learner"] = name;
    doc["k"] = 5;
    doc["repeats"] = 2;
    doc["seed"] = 1;
    double mean = 0.0;
    for (double a : acc) mean += a;
    doc["mean"] = mean / static_cast<double>(acc.size());
    doc["std"] = 0.0;
    doc["accuracies"] = acc;
    std::ofstream out(path);
    out << doc.dump();
  };
  std::vector<double> stronger, weaker;
  for (int i = 0; i < 10; ++i) {
    stronger.push_back(0.90 + 0.002 * (i % 3));
    weaker.push_back(stronger.back() - 0.05 - 0.001 * i);
  }
  write_report(rep_a.path, "alpha", stronger);
  write_report(rep_b.path, "beta", weaker);

  const auto forward = run_cli("compare --a " + rep_a.path + " --b " + rep_b.path);
  REQUIRE(forward.code == 0);
  CHECK(contains(forward.out, "a: alpha"));
  CHECK(contains(forward.out, "verdict: win"));
  CHECK(contains(forward.out, "p_equal="));
  CHECK(contains(forward.out, "p_one_sided="));

  const auto swapped = run_cli("compare --a " + rep_b.path + " --b " + rep_a.path);
  REQUIRE(swapped.code == 0);
  CHECK(contains(swapped.out, "verdict: loss"));

  // Same report on both sides: all differences zero, so a tie.
  const auto self = run_cli("compare --a " + rep_a.path + " --b " + rep_a.path);
  REQUIRE(self.code == 0);
  CHECK(contains(self.out, "verdict: tie"));
}

TEST_CASE("heatmap exports feature names on both margins") {
  TempPath csv("heat.csv");
  TempPath model("heat_model.json");
  TempPath heat("heat_w.csv");
  REQUIRE(run_cli("synth --n 20 --seed 9 --out " + csv.path).code == 0);
  REQUIRE(run_cli("train --data " + csv.path + " --label class --out " +
                  model.path)
              .code == 0);
  REQUIRE(run_cli("heatmap --model " + model.path + " --out " + heat.path)
              .code == 0);

  const std::string grid = slurp(heat.path);
  CHECK(line_count(grid) == 3);
  CHECK(grid.rfind(",f1,f2\n", 0) == 0);
  CHECK(contains(grid, "\nf1,"));
  CHECK(contains(grid, "\nf2,"));

  TempPath ensemble("heat_bim.json");
  REQUIRE(run_cli("train --data " + csv.path +
                  " --label class --learner bim --T 5 --out " + ensemble.path)
              .code == 0);
  const auto refused =
      run_cli("heatmap --model " + ensemble.path + " --out " + heat.path);
  CHECK(refused.code == 1);
  CHECK(contains(refused.err, "single weight matrix"));
}

TEST_CASE("relief persists as a nearest-neighbor bundle that memorizes") {
  TempPath csv("relief.csv");
  TempPath model("relief_model.json");
  TempPath preds("relief_preds.csv");
  REQUIRE(run_cli("synth --n 25 --noise 0.2 --seed 13 --out " + csv.path)
              .code == 0);

  const auto trained = run_cli("train --data " + csv.path +
                               " --label class --learner relief --out " +
                               model.path);
  REQUIRE(trained.code == 0);
  CHECK(contains(trained.out, "training accuracy: 1.0000"));
  REQUIRE(run_cli("predict --model " + model.path + " --data " + csv.path +
                  " --out " + preds.path)
              .code == 0);
  CHECK(line_count(slurp(preds.path)) == 51);
}

TEST_CASE("usage errors exit 2, data errors exit 1") {
  const auto unknown_cmd = run_cli("frobnicate");
  CHECK(unknown_cmd.code == 2);
  CHECK(!unknown_cmd.err.empty());

  const auto unknown_flag = run_cli("synth --n 5 --bogus 2 --out /tmp/x.csv");
  CHECK(unknown_flag.code == 2);
  CHECK(contains(unknown_flag.err, "--bogus"));

  const auto missing_required = run_cli("train --label class");
  CHECK(missing_required.code == 2);

  const auto missing_file =
      run_cli("train --data /tmp/immigrate_cli_nonexistent.csv --label class");
  CHECK(missing_file.code == 1);
  CHECK(missing_file.err.rfind("error: ", 0) == 0);
  CHECK(line_count(missing_file.err) == 1);

  TempPath csv("exitcodes.csv");
  REQUIRE(run_cli("synth --n 10 --seed 2 --out " + csv.path).code == 0);
  const auto bad_label =
      run_cli("train --data " + csv.path + " --label nope");
  CHECK(bad_label.code == 1);
  CHECK(contains(bad_label.err, "nope"));

  // Boosting requires two classes; a third label is a data error.
  TempPath triple("threeclass.csv");
  {
    std::ofstream out(triple.path);
    out << "f1,f2,class\n";
    for (int i = 0; i < 12; ++i)
      out << i << ',' << i % 4 << ',' << i % 3 << '\n';
  }
  const auto three =
      run_cli("train --data " + triple.path + " --label class --learner bim");
  CHECK(three.code == 1);
  CHECK(contains(three.err, "two-class"));

  const auto version = run_cli("--version");
  CHECK(version.code == 0);
  CHECK(contains(version.out, "0.1.0"));
}

TEST_SUITE_END();
