#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "earlywarn/error.hpp"
#include "earlywarn/eval.hpp"
#include "earlywarn/models.hpp"
#include "earlywarn/sweep.hpp"
#include "oracles.hpp"

using namespace earlywarn;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no Error thrown");
  return ErrorCode::IoError;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<FinalResult> repeat(FinalResult r, std::size_t n) { return std::vector<FinalResult>(n, r); }

SweepConfig fast_sweep(std::vector<std::string> models) {
  SweepConfig cfg;
  for (const auto& m : models) cfg.models.push_back(ModelSpec::parse(m));
  cfg.schemes = {LabelScheme::Binary, LabelScheme::Multiclass};
  cfg.train.seed = 3;
  return cfg;
}

std::map<std::string, LabeledDataset> small_synthetic(LabelScheme scheme = LabelScheme::Multiclass) {
  SyntheticConfig sc;
  sc.n_per_class = 12;
  sc.scheme = scheme;
  sc.seed = 5;
  return {{"SYN", gen_synthetic(sc)}};
}

}  // namespace

TEST_CASE("confusion: perfect predictions are diagonal") {
  const std::vector<int> y{0, 1, 2, 3, 1, 1};
  const auto cm = confusion(y, y, 4);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t p = 0; p < 4; ++p) {
      if (t != p) CHECK(cm.at(t, p) == 0);
    }
  }
  CHECK(cm.at(1, 1) == 3);
}

TEST_CASE("confusion: truths [P,P,N], preds [P,N,N]") {
  const std::vector<int> truths{0, 0, 1}, preds{0, 1, 1};
  const auto cm = confusion(preds, truths, 2);
  CHECK(cm.true_positives(0) == 1);
  CHECK(cm.false_negatives(0) == 1);
  CHECK(cm.true_negatives(0) == 1);
  CHECK(cm.false_positives(0) == 0);
}

TEST_CASE("confusion errors") {
  const std::vector<int> a{0, 1}, b{0};
  CHECK(code_of([&] { confusion(a, b, 2); }) == ErrorCode::LengthMismatch);
  const std::vector<int> c{0, 2};
  CHECK(code_of([&] { confusion(c, a, 2); }) == ErrorCode::ClassOutOfRange);
  const std::vector<int> neg{-1, 0};
  CHECK(code_of([&] { confusion(neg, a, 2); }) == ErrorCode::ClassOutOfRange);
}

TEST_CASE("confusion counts sum to the sample count") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng.below(50);
    std::vector<int> p(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng.below(4));
      t[i] = static_cast<int>(rng.below(4));
    }
    CHECK(confusion(p, t, 4).total() == n);
  }
}

TEST_CASE("f1 spot values") {
  CHECK(f1_score(0.5, 1.0) == 2.0 / 3.0);
  CHECK(f1_score(0.0, 0.0) == 0.0);

  // Class 0: TP = 0, FP = 0, FN = 5.
  const std::vector<int> truths{0, 0, 0, 0, 0, 1}, preds{1, 1, 1, 1, 1, 1};
  const auto m = f1_metrics(confusion(preds, truths, 2));
  CHECK(m.precision[0] == 0.0);
  CHECK(m.recall[0] == 0.0);
  CHECK(m.f1[0] == 0.0);
}

TEST_CASE("f1_metrics equals brute force on random inputs, with internal consistency") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = trial % 2 == 0 ? 2 : 4;
    const std::size_t n = 1 + rng.below(200);
    std::vector<int> p(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
      t[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    }
    const auto m = f1_metrics(confusion(p, t, static_cast<std::size_t>(k)));
    const auto ref = oracle::brute_force_metrics(p, t, k);
    for (int c = 0; c < k; ++c) {
      CHECK(std::abs(m.precision[c] - ref.precision[c]) <= 1e-12);
      CHECK(std::abs(m.recall[c] - ref.recall[c]) <= 1e-12);
      CHECK(std::abs(m.f1[c] - ref.f1[c]) <= 1e-12);
      CHECK(std::abs(f1_score(m.precision[c], m.recall[c]) - m.f1[c]) <= 1e-12);
    }
    CHECK(std::abs(m.macro_f1 - ref.macro) <= 1e-12);
    CHECK(std::abs(m.weighted_f1 - ref.weighted) <= 1e-12);
    CHECK(std::abs(m.micro_f1 - m.accuracy) <= 1e-12);
  }
}

TEST_CASE("metrics are invariant under sample permutation") {
  Rng rng(8);
  std::vector<int> p(120), t(120);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = static_cast<int>(rng.below(4));
    t[i] = static_cast<int>(rng.below(4));
  }
  const auto before = f1_metrics(confusion(p, t, 4));
  std::vector<std::size_t> order(p.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<int> p2, t2;
  for (auto i : order) {
    p2.push_back(p[i]);
    t2.push_back(t[i]);
  }
  CHECK(f1_metrics(confusion(p2, t2, 4)) == before);
}

TEST_CASE("positive-class F1 collapses multiclass onto the binary scheme") {
  // Distinction, Pass -> Positive; Fail, Withdrawn -> Negative.
  const std::vector<int> truths{0, 1, 2, 3}, preds{1, 0, 3, 2};
  CHECK(positive_class_f1(preds, truths, LabelScheme::Multiclass) == 1.0);
  CHECK(f1_metrics(confusion(preds, truths, 4)).macro_f1 == 0.0);
}

TEST_CASE("baseline: balanced binary test with a positive majority") {
  auto train = repeat(FinalResult::Pass, 3);
  train.push_back(FinalResult::Fail);
  std::vector<FinalResult> test{FinalResult::Pass, FinalResult::Fail, FinalResult::Distinction,
                                FinalResult::Withdrawn};
  const auto b = baseline_report(train, test, LabelScheme::Binary);
  CHECK(b.majority_name == "Positive");
  CHECK(b.f1.positive == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(b.f1.macro == doctest::Approx(1.0 / 3.0));
  CHECK(b.f1.weighted == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("baseline: single-class test equal to the majority scores 1 everywhere") {
  const auto train = repeat(FinalResult::Pass, 5);
  const auto test = repeat(FinalResult::Pass, 7);
  const auto b = baseline_report(train, test, LabelScheme::Multiclass);
  CHECK(b.majority_name == "Pass");
  CHECK(b.f1.weighted == 1.0);
  CHECK(b.f1.positive == 1.0);
  const auto bb = baseline_report(train, test, LabelScheme::Binary);
  CHECK(bb.f1.weighted == 1.0);
  CHECK(bb.f1.positive == 1.0);
  // Macro averages in the classes absent from both sides as zeros.
  CHECK(b.f1.macro == doctest::Approx(0.25));
}

TEST_CASE("parse_horizons grammar") {
  CHECK(parse_horizons("5:40:5") == default_horizons());
  CHECK(parse_horizons("5,10,20") == std::vector<std::size_t>{5, 10, 20});
  CHECK(parse_horizons("3:10:3") == std::vector<std::size_t>{3, 6, 9});
  CHECK(parse_horizons(" 7 ") == std::vector<std::size_t>{7});
  for (const char* bad : {"", "0,5", "10,5", "5,5", "5:40", "5:40:0", "40:5:5", "a,b", "5;10"}) {
    CAPTURE(bad);
    CHECK(code_of([&] { parse_horizons(bad); }) == ErrorCode::InvalidHorizon);
  }
}

TEST_CASE("default grid is 5..40 step 5") {
  CHECK(default_horizons() == std::vector<std::size_t>{5, 10, 15, 20, 25, 30, 35, 40});
}

TEST_CASE("sweep: 2 models x 2 schemes x 8 horizons -> 32 ordered rows") {
  const auto data = small_synthetic();
  const auto cfg = fast_sweep({"majority", "knn"});
  const auto result = horizon_sweep(data, cfg);
  REQUIRE(result.rows.size() == 32);
  std::size_t i = 0;
  for (const char* m : {"majority", "knn-euclidean"}) {
    for (auto s : {LabelScheme::Binary, LabelScheme::Multiclass}) {
      for (auto h : default_horizons()) {
        const auto& r = result.rows[i++];
        CHECK(r.model == m);
        CHECK(r.scheme == s);
        CHECK(r.horizon == h);
        CHECK(r.course == "SYN");
        CHECK(r.ok());
        CHECK(r.wall_s == 0.0);
      }
    }
  }
}

TEST_CASE("sweep: worker count does not change the table") {
  const auto data = small_synthetic();
  auto cfg = fast_sweep({"knn", "mlp"});
  cfg.horizons = {5, 20};
  cfg.train.max_epochs = 3;
  const auto serial = horizon_sweep(data, cfg);
  cfg.workers = 3;
  const auto parallel = horizon_sweep(data, cfg);
  oracle::TempDir dir("sweep_workers");
  export_report(serial, ReportFormat::Csv, dir.path() / "a.csv");
  export_report(parallel, ReportFormat::Csv, dir.path() / "b.csv");
  CHECK(slurp(dir.path() / "a.csv") == slurp(dir.path() / "b.csv"));
}

TEST_CASE("sweep: a failing job is recorded and the sweep continues") {
  auto data = small_synthetic();
  // Every test-cohort sample removed for one course.
  LabeledDataset train_only = split_by_cohort(data.at("SYN"), SplitSpec{}).first;
  train_only.course = "TRN";
  data.emplace("TRN", train_only);
  auto cfg = fast_sweep({"majority"});
  cfg.horizons = {5, 10};
  cfg.schemes = {LabelScheme::Binary};
  const auto result = horizon_sweep(data, cfg);
  REQUIRE(result.rows.size() == 4);
  CHECK(result.rows[0].course == "SYN");
  CHECK(result.rows[0].ok());
  CHECK(result.rows[2].course == "TRN");
  CHECK_FALSE(result.rows[2].ok());
  CHECK(std::isnan(result.rows[2].metrics.weighted_f1));
  CHECK(result.rows[2].error.find("EmptyCourse") != std::string::npos);
}

TEST_CASE("sweep config validation") {
  SweepConfig cfg;
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidConfig);
  cfg.models = {ModelSpec::parse("majority")};
  cfg.horizons = {10, 5};
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidHorizon);
  cfg.horizons = {};
  CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidHorizon);
}

TEST_CASE("report export / import round trip") {
  const auto data = small_synthetic();
  auto cfg = fast_sweep({"majority", "knn"});
  cfg.record_wall_time = true;
  const auto result = horizon_sweep(data, cfg);
  oracle::TempDir dir("report");

  SUBCASE("csv: header plus one line per row, values survive at 6 decimals") {
    export_report(result, ReportFormat::Csv, dir.path() / "report.csv");
    const std::string text = slurp(dir.path() / "report.csv");
    CHECK(text.substr(0, text.find('\n')) == kReportColumns);
    CHECK(std::count(text.begin(), text.end(), '\n') == 33);
    const auto back = import_report(dir.path() / "report.csv");
    REQUIRE(back.rows.size() == result.rows.size());
    for (std::size_t i = 0; i < back.rows.size(); ++i) {
      const auto& a = result.rows[i];
      const auto& b = back.rows[i];
      CHECK(a.model == b.model);
      CHECK(a.scheme == b.scheme);
      CHECK(a.horizon == b.horizon);
      CHECK(a.course == b.course);
      CHECK(a.seed == b.seed);
      CHECK(std::abs(a.metrics.macro_f1 - b.metrics.macro_f1) <= 5e-7);
      CHECK(std::abs(a.metrics.weighted_f1 - b.metrics.weighted_f1) <= 5e-7);
      CHECK(std::abs(a.positive_f1 - b.positive_f1) <= 5e-7);
      CHECK(std::abs(a.wall_s - b.wall_s) <= 5e-7);
    }
    // Re-exporting the imported table reproduces the file byte for byte.
    export_report(back, ReportFormat::Csv, dir.path() / "again.csv");
    CHECK(slurp(dir.path() / "again.csv") == text);
  }
  SUBCASE("json mirrors the full metrics report") {
    export_report(result, ReportFormat::Json, dir.path() / "report.json");
    const auto back = import_report(dir.path() / "report.json");
    REQUIRE(back.rows.size() == result.rows.size());
    for (std::size_t i = 0; i < back.rows.size(); ++i) {
      const auto& a = result.rows[i].metrics;
      const auto& b = back.rows[i].metrics;
      CHECK(a.support == b.support);
      CHECK(a.class_names == b.class_names);
      for (std::size_t k = 0; k < a.f1.size(); ++k) CHECK(std::abs(a.f1[k] - b.f1[k]) <= 5e-7);
      CHECK(back.rows[i].description == result.rows[i].description);
    }
    export_report(back, ReportFormat::Json, dir.path() / "again.json");
    CHECK(slurp(dir.path() / "again.json") == slurp(dir.path() / "report.json"));
  }
  SUBCASE("empty result: IoError and no file") {
    CHECK(code_of([&] { export_report({}, ReportFormat::Csv, dir.path() / "empty.csv"); }) ==
          ErrorCode::IoError);
    CHECK_FALSE(std::filesystem::exists(dir.path() / "empty.csv"));
  }
  SUBCASE("plot data: one line per (course, scheme, horizon), one column per model") {
    export_plot_data(result, dir.path() / "plot_data.csv");
    const std::string text = slurp(dir.path() / "plot_data.csv");
    CHECK(text.substr(0, text.find('\n')) == "course,scheme,horizon,majority,knn-euclidean");
    CHECK(std::count(text.begin(), text.end(), '\n') == 17);
  }
}

TEST_CASE("failed rows survive csv and json round trips") {
  HorizonSweepResult r;
  SweepRow row;
  row.model = "fcn";
  row.course = "BBB";
  row.horizon = 5;
  row.status = "failed";
  row.error = "TrainingFailed: x";
  row.metrics.macro_f1 = row.metrics.weighted_f1 = row.positive_f1 = std::nan("");
  r.rows.push_back(row);
  oracle::TempDir dir("failed");
  export_report(r, ReportFormat::Csv, dir.path() / "r.csv");
  export_report(r, ReportFormat::Json, dir.path() / "r.json");
  for (const char* name : {"r.csv", "r.json"}) {
    const auto back = import_report(dir.path() / name);
    REQUIRE(back.rows.size() == 1);
    CHECK_FALSE(back.rows[0].ok());
    CHECK(std::isnan(back.rows[0].metrics.weighted_f1));
  }
}
