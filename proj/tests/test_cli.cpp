#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "earlywarn/cli.hpp"
#include "earlywarn/eval.hpp"
#include "earlywarn/sweep.hpp"
#include "oracles.hpp"
#include "oulad_fixture.hpp"

using namespace earlywarn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "earlywarn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Small synthetic dataset written once per test binary.
const fs::path& synth_dir() {
  static oracle::TempDir dir("cli_synth");
  static bool made = false;
  if (!made) {
    const auto r = run({"synth", "--out", (dir.path() / "ds").string(), "--seed", "3", "--n-per-class",
                        "16", "--weeks", "12", "--activities", "3"});
    REQUIRE(r.code == 0);
    made = true;
  }
  static const fs::path ds = dir.path() / "ds";
  return ds;
}

std::vector<std::string> quick_training() {
  return {"--epochs", "4", "--patience", "2", "--batch-size", "8", "--lr", "0.005"};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("unknown subcommand exits 1 with a synopsis") {
  const auto r = run({"frobnicate"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(r.err.find("sweep") != std::string::npos);
}

TEST_CASE("the installed binary reports usage errors the same way") {
  const char* exe = std::getenv("EARLYWARN_CLI");
  if (!exe) return;
  oracle::TempDir dir("cli_exe");
  const std::string cmd = std::string(exe) + " frobnicate 2> " + (dir.path() / "err.txt").string();
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 1);
  CHECK(slurp(dir.path() / "err.txt").find("Usage") != std::string::npos);
}

TEST_CASE("usage and data errors map to exit codes") {
  oracle::TempDir dir("cli_errors");
  SUBCASE("missing seed") {
    const auto r = run({"synth", "--out", dir.path().string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("seed") != std::string::npos);
  }
  SUBCASE("missing --out") {
    CHECK(run({"synth", "--seed", "1"}).code == 1);
  }
  SUBCASE("missing dataset directory") {
    const auto r = run({"sweep", "--dataset", (dir.path() / "nope").string(), "--out",
                        (dir.path() / "o").string(), "--seed", "1", "--models", "majority"});
    CHECK(r.code == 2);
  }
  SUBCASE("missing OULAD files") {
    fs::create_directories(dir.path() / "empty");
    const auto r = run({"ingest", "--oulad-dir", (dir.path() / "empty").string(), "--out",
                        (dir.path() / "o").string()});
    CHECK(r.code == 2);
    CHECK(fs::exists(dir.path() / "o" / "run_manifest.json"));
  }
  SUBCASE("bad horizon grammar") {
    const auto r = run({"sweep", "--dataset", synth_dir().string(), "--out", (dir.path() / "o").string(),
                        "--seed", "1", "--horizons", "10:5:5"});
    CHECK(r.code == 1);
  }
  SUBCASE("train needs exactly one model") {
    const auto r = run({"train", "--dataset", synth_dir().string(), "--out", (dir.path() / "o").string(),
                        "--seed", "1", "--horizon", "5"});
    CHECK(r.code == 1);
  }
}

TEST_CASE("synth writes a loadable dataset and a manifest") {
  const auto ds = load_dataset(synth_dir());
  CHECK(ds.size() == 32);
  CHECK(ds.tensor.n_weeks == 12);
  CHECK(ds.tensor.n_activities == 3);
  const auto manifest = nlohmann::json::parse(slurp(synth_dir() / "run_manifest.json"));
  CHECK(manifest.at("command") == "synth");
  CHECK(manifest.at("seed") == 3);
  CHECK(manifest.at("exit_code") == 0);
  CHECK(manifest.at("versions").contains("eigen"));
}

TEST_CASE("sweep twice with the same seed gives byte-identical reports") {
  oracle::TempDir dir("cli_sweep");
  const std::vector<std::string> base = concat(
      {"sweep", "--dataset", synth_dir().string(), "--models", "fcn,mlp,knn,majority", "--horizons",
       "4,8,12", "--scheme", "binary", "--seed", "42"},
      quick_training());
  const auto a = run(concat(base, {"--out", (dir.path() / "a").string()}));
  REQUIRE(a.code == 0);
  const auto b = run(concat(base, {"--out", (dir.path() / "b").string(), "--workers", "2"}));
  REQUIRE(b.code == 0);
  const std::string csv = slurp(dir.path() / "a" / "report.csv");
  CHECK(csv == slurp(dir.path() / "b" / "report.csv"));
  CHECK(slurp(dir.path() / "a" / "plot_data.csv") == slurp(dir.path() / "b" / "plot_data.csv"));

  const auto result = import_report(dir.path() / "a" / "report.csv");
  CHECK(result.rows.size() == 12);
  for (const auto& r : result.rows) CHECK(r.ok());
  CHECK(csv.rfind(std::string(kReportColumns), 0) == 0);

  SUBCASE("replaying the manifest reproduces the report") {
    const auto c = run({"sweep", "--config", (dir.path() / "a" / "run_manifest.json").string(), "--out",
                        (dir.path() / "c").string()});
    REQUIRE(c.code == 0);
    CHECK(slurp(dir.path() / "c" / "report.csv") == csv);
  }
  SUBCASE("report re-export") {
    const auto r = run({"report", "--input", (dir.path() / "a" / "report.json").string(), "--out",
                        (dir.path() / "r").string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir.path() / "r" / "report.csv") == csv);
    const auto bad = run({"report", "--input", (dir.path() / "a" / "report.csv").string(), "--out",
                          (dir.path() / "r2").string(), "--format", "xml"});
    CHECK(bad.code == 1);
  }
}

TEST_CASE("train writes a checkpoint, normalization and reports") {
  oracle::TempDir dir("cli_train");
  const std::vector<std::string> base =
      concat({"train", "--dataset", synth_dir().string(), "--model", "fcn", "--horizon", "8", "--seed", "5"},
             quick_training());
  const auto a = run(concat(base, {"--out", (dir.path() / "a").string()}));
  REQUIRE(a.code == 0);
  for (const char* f : {"model/model.json", "model/params.bin", "normalization.json", "report.csv",
                        "report.json", "plot_data.csv", "run_manifest.json"}) {
    CHECK_MESSAGE(fs::exists(dir.path() / "a" / f), f);
  }
  const auto b = run(concat(base, {"--out", (dir.path() / "b").string()}));
  REQUIRE(b.code == 0);
  CHECK(slurp(dir.path() / "a" / "report.csv") == slurp(dir.path() / "b" / "report.csv"));
  CHECK(slurp(dir.path() / "a" / "model" / "params.bin") == slurp(dir.path() / "b" / "model" / "params.bin"));

  const ModelState state = load_model(dir.path() / "a" / "model");
  CHECK(state.fit.horizon == 8);
  CHECK(state.fit.seed == 5);

  const auto norm = nlohmann::json::parse(slurp(dir.path() / "a" / "normalization.json"));
  CHECK(norm.at("channels").size() == 3);
}

TEST_CASE("baseline on a dataset prints every convention") {
  oracle::TempDir dir("cli_baseline");
  const auto r = run({"baseline", "--dataset", synth_dir().string(), "--scheme", "both", "--out",
                      dir.path().string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("macro=") != std::string::npos);
  CHECK(r.out.find("reference=0.58") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir.path() / "baseline.json"));
  CHECK(j.at("rows").size() == 2);
}

TEST_CASE("ingest and build on the mini OULAD fixture") {
  oracle::TempDir dir("cli_oulad");
  fixture::write_mini_oulad(dir.path() / "oulad");
  const auto i = run({"ingest", "--oulad-dir", (dir.path() / "oulad").string(), "--out",
                      (dir.path() / "i").string()});
  REQUIRE(i.code == 0);
  const auto summary = nlohmann::json::parse(slurp(dir.path() / "i" / "ingest_summary.json"));
  CHECK(summary.at("participants_per_presentation").at("AAA/2014J") == 2);

  const auto b = run({"build", "--oulad-dir", (dir.path() / "oulad").string(), "--course", "AAA",
                      "--out", (dir.path() / "b").string()});
  REQUIRE(b.code == 0);
  CHECK(b.out.find("quiz") != std::string::npos);
  const auto ds = load_dataset(dir.path() / "b" / "AAA");
  CHECK(ds.size() == 4);

  const auto unknown = run({"build", "--oulad-dir", (dir.path() / "oulad").string(), "--course", "ZZZ",
                            "--out", (dir.path() / "z").string()});
  CHECK(unknown.code == 2);

  setenv(cli::kOuladDirEnv, (dir.path() / "oulad").string().c_str(), 1);
  const auto env = run({"ingest", "--out", (dir.path() / "e").string()});
  unsetenv(cli::kOuladDirEnv);
  CHECK(env.code == 0);
}

TEST_CASE("RunConfig JSON round trip") {
  cli::RunConfig c;
  c.command = "sweep";
  c.datasets = {synth_dir()};
  c.out_dir = "/tmp/x";
  c.seed = 9;
  c.horizons = {5, 10};
  c.models = {ModelSpec::parse("knn-dtw")};
  c.schemes = {LabelScheme::Multiclass};
  c.workers = 3;
  const auto j = c.to_json();
  const auto back = cli::RunConfig::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.seed == c.seed);
  CHECK(back.models.front().name() == "knn-dtw");
}
