#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lidc/cli.hpp"
#include "lidc/error.hpp"
#include "lidc/model_store.hpp"
#include "synthetic.hpp"

using namespace lidc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("lidc_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = cli::run(args);
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str(), err.str()};
}

void write(const std::string& path, const std::string& content) {
  std::ofstream(path, std::ios::binary) << content;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string to_tsv(const Dataset& d) {
  std::string s;
  for (const auto& doc : d.documents) s += doc.text + "\t" + d.catalog.name(*doc.label) + "\n";
  return s;
}

struct Fixture {
  TempDir dir;
  std::string train, dev;
  Fixture() {
    train = dir / "train.tsv";
    dev = dir / "dev.tsv";
    write(train, to_tsv(synthetic::disjoint_corpus(20, 1)));
    write(dev, to_tsv(synthetic::disjoint_corpus(6, 2)));
  }
  std::string model() {
    const std::string path = dir / "model.json";
    if (!fs::exists(path)) {
      REQUIRE(run({"train", "--train", train, "--out", path, "--quiet"}).code == 0);
    }
    return path;
  }
};

}  // namespace

TEST_CASE("train with defaults writes the submitted configuration") {
  Fixture f;
  const auto r = run({"train", "--train", f.train, "--out", f.dir / "m.json"});
  CHECK(r.code == cli::kExitOk);
  const Ensemble ens = load_model(f.dir / "m.json");
  REQUIRE(ens.members().size() == 3);
  CHECK(ens.members()[0].spec().to_string() == "char:2");
  CHECK(ens.members()[1].spec().to_string() == "char:3");
  CHECK(ens.members()[2].spec().to_string() == "char:4");
  CHECK(ens.members()[0].model.config().C == 1.0);
  CHECK(r.err.find("vocabulary") != std::string::npos);
  CHECK(r.err.find("epochs") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("train flag errors exit 2") {
  Fixture f;
  const auto bad = run({"train", "--train", f.train, "--features", "char:9", "--out", f.dir / "m"});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("1..8") != std::string::npos);
  CHECK(!fs::exists(f.dir / "m"));

  const auto missing = run({"train", "--out", f.dir / "m"});
  CHECK(missing.code == cli::kExitUsage);
  CHECK(missing.err.find("--train") != std::string::npos);

  CHECK(run({"train", "--train", f.train, "--out", f.dir / "m", "--bogus"}).code ==
        cli::kExitUsage);
  CHECK(run({"train", "--train", f.train, "--out", f.dir / "m", "--c", "0"}).code ==
        cli::kExitUsage);
  CHECK(run({"train", "--train", f.train, "--out", f.dir / "m", "--loss", "log"}).code ==
        cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({}).code == cli::kExitUsage);
}

TEST_CASE("train data errors exit 1") {
  Fixture f;
  write(f.dir / "bad.tsv", "no tab here\n");
  const auto r = run({"train", "--train", f.dir / "bad.tsv", "--out", f.dir / "m"});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("line 1") != std::string::npos);
  CHECK(run({"train", "--train", f.dir / "missing.tsv", "--out", f.dir / "m"}).code ==
        cli::kExitData);
}

TEST_CASE("help documents every flag") {
  const auto r = run({"train", "--help"});
  CHECK(r.code == 0);
  for (const char* flag : {"--train", "--features", "--skip-mode", "--c", "--loss", "--tol",
                           "--max-epochs", "--seed", "--fit-bias", "--bias-scale", "--min-df",
                           "--strip-punctuation", "--lowercase", "--out", "--config", "--threads"}) {
    CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
  }
  for (const auto& cmd : std::vector<std::vector<std::string>>{
           {"predict", "--help"}, {"evaluate", "--help"}, {"tune", "c", "--help"},
           {"tune", "ablate", "--help"}, {"tune", "combos", "--help"}, {"--help"}}) {
    CHECK(run(cmd).code == 0);
  }
}

TEST_CASE("predict keeps line alignment") {
  Fixture f;
  const auto model = f.model();
  write(f.dir / "in.txt", "abcd efgh\nαβγδ\n\n");
  const auto r = run({"predict", "--model", model, "--input", f.dir / "in.txt", "--out",
                      f.dir / "preds.tsv", "--quiet"});
  CHECK(r.code == 0);
  const std::string preds = slurp(f.dir / "preds.tsv");
  std::istringstream lines(preds);
  std::vector<std::string> rows;
  for (std::string line; std::getline(lines, line);) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "abcd efgh\tAWA");
  CHECK(rows[1] == "αβγδ\tBHO");
  CHECK(rows[2].rfind("\t", 0) == 0);

  const auto to_stdout = run({"predict", "--model", model, "--input", f.dir / "in.txt", "--quiet"});
  CHECK(to_stdout.out == preds);

  write(f.dir / "empty.txt", "");
  const auto empty = run({"predict", "--model", model, "--input", f.dir / "empty.txt", "--out",
                          f.dir / "empty.tsv"});
  CHECK(empty.code == 0);
  CHECK(slurp(f.dir / "empty.tsv").empty());

  CHECK(run({"predict", "--model", f.dir / "nope.json", "--input", f.dir / "in.txt"}).code ==
        cli::kExitData);
}

TEST_CASE("evaluate writes reports") {
  Fixture f;
  const auto model = f.model();
  const auto r = run({"evaluate", "--model", model, "--test", f.dev, "--report",
                      f.dir / "report.json", "--confusion", f.dir / "cm.csv", "--confusion-svg",
                      f.dir / "cm.svg", "--error-report", f.dir / "errors.tsv"});
  CHECK(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(f.dir / "report.json"));
  CHECK(report["macro_f1"] == 1.0);
  CHECK(report["per_label"].size() == 5);
  CHECK(slurp(f.dir / "cm.csv").rfind("gold\\predicted,AWA,BHO,BRA,HIN,MAG\n", 0) == 0);
  CHECK(slurp(f.dir / "cm.svg").find("<svg") != std::string::npos);
  CHECK(slurp(f.dir / "errors.tsv").find("# misclassified\t0\tof\t30") != std::string::npos);

  const auto baseline = run({"evaluate", "--baseline", "random", "--seed", "7", "--test", f.dev,
                             "--report", f.dir / "base.json"});
  CHECK(baseline.code == 0);
  const auto base = nlohmann::json::parse(slurp(f.dir / "base.json"));
  CHECK(base["macro_f1"].get<double>() < 1.0);
  const auto again = run({"evaluate", "--baseline", "random", "--seed", "7", "--test", f.dev,
                          "--report", f.dir / "base2.json"});
  CHECK(slurp(f.dir / "base.json") == slurp(f.dir / "base2.json"));

  write(f.dir / "unlabeled.txt", "just text\n");
  CHECK(run({"evaluate", "--model", model, "--test", f.dir / "unlabeled.txt"}).code ==
        cli::kExitData);
  CHECK(run({"evaluate", "--test", f.dev}).code == cli::kExitUsage);
}

TEST_CASE("tune c on separable data picks the smallest C") {
  Fixture f;
  const auto r = run({"tune", "c", "--train", f.train, "--dev", f.dev, "--tsv", f.dir / "c.tsv",
                      "--json", f.dir / "c.json", "--quiet"});
  CHECK(r.code == 0);
  CHECK(r.out.find("C=0.001") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(f.dir / "c.json"));
  CHECK(j["records"].size() == 7);
  CHECK(j["best"] == 0);

  const auto one =
      run({"tune", "c", "--train", f.train, "--dev", f.dev, "--c-grid", "10", "--quiet"});
  CHECK(one.out.find("C=10\t") != std::string::npos);
}

TEST_CASE("tune ablate and combos") {
  Fixture f;
  const auto ablate = run({"tune", "ablate", "--train", f.train, "--dev", f.dev, "--tsv",
                           f.dir / "ablate.tsv", "--quiet"});
  CHECK(ablate.code == 0);
  const std::string tsv = slurp(f.dir / "ablate.tsv");
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 15);

  write(f.dir / "cands.txt", "# one combination per line\nchar:2,char:3,char:4\n");
  const auto single = run({"tune", "combos", "--train", f.train, "--dev", f.dev, "--candidates",
                           f.dir / "cands.txt", "--quiet"});
  CHECK(single.code == 0);
  CHECK(single.out.find("best\tchar:2,char:3,char:4\t") == 0);

  const auto power = run({"tune", "combos", "--train", f.train, "--dev", f.dev, "--features",
                          "char:2,char:3", "--powerset-max-size", "2", "--json",
                          f.dir / "p.json", "--quiet"});
  CHECK(power.code == 0);
  CHECK(nlohmann::json::parse(slurp(f.dir / "p.json"))["records"].size() == 3);

  write(f.dir / "bad.txt", "char:2,char:42\n");
  const auto bad = run({"tune", "combos", "--train", f.train, "--dev", f.dev, "--candidates",
                        f.dir / "bad.txt"});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("bad.txt:1") != std::string::npos);
  CHECK(run({"tune", "combos", "--train", f.train, "--dev", f.dev}).code == cli::kExitUsage);
}

TEST_CASE("config file values yield to command-line flags") {
  const std::vector<std::string> args = {"train", "--c", "5", "--no-fit-bias"};
  const auto merged =
      cli::merge_config(args, R"({"c": 0.5, "max_epochs": 7, "fit_bias": true, "features": ["char:1", "word:1"]})");
  CHECK(std::count(merged.begin(), merged.end(), "--c=0.5") == 0);
  CHECK(std::count(merged.begin(), merged.end(), "--max-epochs=7") == 1);
  CHECK(std::count(merged.begin(), merged.end(), "--fit-bias=true") == 0);
  CHECK(std::count(merged.begin(), merged.end(), "--features=char:1,word:1") == 1);
  CHECK_THROWS_AS(cli::merge_config(args, "[1]"), ConfigError);
  CHECK_THROWS_AS(cli::merge_config(args, "{"), ConfigError);

  Fixture f;
  write(f.dir / "cfg.json", R"({"c": 0.25, "features": "char:1", "seed": 3})");
  CHECK(run({"train", "--train", f.train, "--out", f.dir / "a.json", "--config",
             f.dir / "cfg.json", "--quiet"})
            .code == 0);
  const Ensemble a = load_model(f.dir / "a.json");
  CHECK(a.members().size() == 1);
  CHECK(a.members()[0].model.config().C == 0.25);
  CHECK(a.provenance().seed == 3);

  CHECK(run({"train", "--train", f.train, "--out", f.dir / "b.json", "--config",
             f.dir / "cfg.json", "--c", "2", "--quiet"})
            .code == 0);
  CHECK(load_model(f.dir / "b.json").members()[0].model.config().C == 2.0);

  write(f.dir / "typo.json", R"({"cee": 1})");
  CHECK(run({"train", "--train", f.train, "--out", f.dir / "c.json", "--config",
             f.dir / "typo.json"})
            .code == cli::kExitUsage);
}

TEST_CASE("outputs do not depend on the thread count") {
  Fixture f;
  ::setenv("SOURCE_DATE_EPOCH", "0", 1);
  for (const char* threads : {"1", "4"}) {
    const std::string t = threads;
    REQUIRE(run({"train", "--train", f.train, "--out", f.dir / ("m" + t + ".json"), "--seed", "5",
                 "--threads", t, "--features", "char:2,word:1,skip:1", "--quiet"})
                .code == 0);
    REQUIRE(run({"predict", "--model", f.dir / ("m" + t + ".json"), "--input", f.dev, "--out",
                 f.dir / ("p" + t + ".tsv"), "--threads", t, "--quiet"})
                .code == 0);
  }
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK(slurp(f.dir / "m1.json") == slurp(f.dir / "m4.json"));
  CHECK(slurp(f.dir / "p1.tsv") == slurp(f.dir / "p4.tsv"));
}
