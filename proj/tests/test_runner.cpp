#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "derived_oracles.hpp"
#include "inertia/inertia.hpp"

using namespace inertia;
namespace fs = std::filesystem;

namespace {

// Tiny suite: 12 s of circle_line, small network, one epoch.
json tiny_suite_json(const std::string& synth_kind = "circle_line") {
  return json::parse(R"({
    "dataset": {"synthetic": {"kind": ")" + synth_kind + R"(", "duration": 12, "noise_acc": 0.02, "noise_gyro": 0.0005, "seed": 3},
                "descriptor": {"window_size": 120, "stride": 60}},
    "model": {"filters": 4, "lstm_hidden": 5, "fc_width": 6},
    "train": {"epochs": 1, "batch_size": 8},
    "techniques": [
      {"type": "baseline"},
      {"type": "head3"},
      {"name": "noise_x3", "type": "augment", "augment": {"kind": "noise", "copies": 3}},
      {"name": "rot_all", "type": "augment", "augment": {"kind": "rotation", "axes": ["T1", "T2", "T3"]}},
      {"name": "zscore", "type": "preprocess", "steps": [{"op": "normalize", "method": "zscore"}]},
      {"name": "huber", "type": "loss", "loss": {"kind": "huber", "delta": 0.5}}
    ],
    "repetitions": 2,
    "base_seed": 40
  })");
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("inertia_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const SuiteReport& tiny_report() {
  static const SuiteReport r = run_suite(suite_from_json(tiny_suite_json()), 1);
  return r;
}

std::size_t index_of(const SuiteReport& r, const std::string& name) {
  for (std::size_t i = 0; i < r.techniques.size(); ++i) {
    if (r.techniques[i].technique.name == name) return i;
  }
  throw std::runtime_error("no technique " + name);
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(INERTIA_BENCH_EXE) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, UnknownKeysRejected) {
  for (const char* path : {"/bogus", "/dataset/bogus", "/dataset/synthetic/bogus", "/model/bogus", "/train/bogus",
                           "/train/loss/bogus", "/techniques/2/augment/bogus", "/techniques/0/bogus"}) {
    auto j = tiny_suite_json();
    j[json::json_pointer(std::string(path))] = 1;
    EXPECT_THROW(suite_from_json(j), ConfigError) << path;
  }
}

TEST(Config, InvalidValuesRejected) {
  auto j = tiny_suite_json();
  j["techniques"].erase(0);
  j["techniques"].push_back({{"type", "head2"}, {"name", "head3"}});
  EXPECT_THROW(suite_from_json(j), ConfigError);
  j = tiny_suite_json();
  j["repetitions"] = 0;
  EXPECT_THROW(suite_from_json(j), ConfigError);
  j = tiny_suite_json();
  j["techniques"][0]["type"] = "dropout";
  EXPECT_THROW(suite_from_json(j), ConfigError);
  j = tiny_suite_json();
  j["repetitions"] = -3;
  EXPECT_THROW(suite_from_json(j), ConfigError);
  j = tiny_suite_json();
  j["techniques"][4]["steps"][0]["op"] = "whiten";
  EXPECT_THROW(suite_from_json(j), ConfigError);
}

TEST(Config, DefaultsAndPresetEpochs) {
  auto j = tiny_suite_json();
  j["train"].erase("epochs");
  j["dataset"]["descriptor"] = {{"preset", "quadnet_horizontal"}};
  const auto s = suite_from_json(j);
  EXPECT_EQ(s.train.epochs, 150u);
  EXPECT_EQ(s.train.learning_rate, 1e-3);
  EXPECT_EQ(s.train.batch_size, 8u);
  EXPECT_EQ(s.model.kernel, 5u);
  EXPECT_EQ(s.model.dropout, 0.25);
  const auto noise = std::get<AugmentTechnique>(s.techniques[2].kind).augmentation;
  EXPECT_EQ(noise.noise_schedule, default_noise_schedule(3));
}

TEST(Config, ShippedSuiteParses) {
  const auto s = load_suite_config(fs::path(INERTIA_TEST_DATA_DIR) / "suite_circle_line.json");
  EXPECT_EQ(s.techniques.size(), 10u);
  EXPECT_EQ(s.repetitions, 3u);
}

TEST(Config, EchoRoundTrips) {
  const auto s = suite_from_json(tiny_suite_json());
  const auto echo = to_json(s);
  EXPECT_EQ(to_json(suite_from_json(echo)), echo);
}

TEST(Workers, EnvironmentOverride) {
  ::setenv("INERTIA_BENCH_WORKERS", "3", 1);
  EXPECT_EQ(resolve_workers(1), 3u);
  ::setenv("INERTIA_BENCH_WORKERS", "zero", 1);
  EXPECT_THROW(resolve_workers(1), ConfigError);
  ::unsetenv("INERTIA_BENCH_WORKERS");
  EXPECT_EQ(resolve_workers(2), 2u);
}

TEST(Split, ChronologicalFloor) {
  InertialSeries s(10);
  for (std::size_t i = 0; i < 10; ++i) s[i].t = static_cast<double>(i);
  const auto [train, test] = split_series(s, 0.25);
  EXPECT_EQ(train.size(), 7u);
  EXPECT_EQ(test.front().t, 7.0);
  EXPECT_THROW(split_series(s, 1.0), DomainError);
}

TEST(Suite, SeedsAreBasePlusRunIndex) {
  for (const auto& t : tiny_report().techniques) {
    ASSERT_EQ(t.runs.size(), 2u);
    EXPECT_EQ(t.runs[0].seed, 40u);
    EXPECT_EQ(t.runs[1].seed, 41u);
    EXPECT_TRUE(t.runs[0].ok) << t.technique.name << ": " << t.runs[0].error;
  }
}

TEST(Suite, AugmentationMultipliersAndTestIsolation) {
  const auto& r = tiny_report();
  const auto& base = r.techniques[index_of(r, "baseline")];
  for (const char* name : {"noise_x3", "rot_all"}) {
    const auto& t = r.techniques[index_of(r, name)];
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_EQ(t.runs[i].diagnostics.augmented_train_windows, 4 * t.runs[i].diagnostics.train_windows);
      EXPECT_EQ(t.runs[i].diagnostics.test_hash, base.runs[i].diagnostics.test_hash);
      EXPECT_EQ(t.runs[i].diagnostics.test_windows, base.runs[i].diagnostics.test_windows);
    }
  }
}

TEST(Suite, PairedInitialization) {
  const auto& r = tiny_report();
  const auto& base = r.techniques[index_of(r, "baseline")];
  for (const char* name : {"noise_x3", "rot_all", "zscore", "huber"}) {
    const auto& t = r.techniques[index_of(r, name)];
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(t.runs[i].diagnostics.init_hash, base.runs[i].diagnostics.init_hash) << name;
  }
  EXPECT_NE(base.runs[0].diagnostics.init_hash, base.runs[1].diagnostics.init_hash);
  // head3 has other shapes; its init must match an independent build from the same seed
  const auto& h3 = r.techniques[index_of(r, "head3")];
  auto mc = r.config.model;
  mc.head_mode = HeadMode::kHead3;
  Rng init = Rng::derive(41, streams::kInit);
  EXPECT_EQ(h3.runs[1].diagnostics.init_hash, parameter_hash(build_model(mc, init)));
}

TEST(Suite, NormalizationStatsComeFromTrainSplit) {
  const auto suite = suite_from_json(tiny_suite_json());
  const auto raw = load_raw_data(suite.dataset);
  const auto stats = fit_normalization(raw.train_series, NormalizeMethod::kZScore);
  const auto& r = tiny_report();
  const auto& z = r.techniques[index_of(r, "zscore")];
  ASSERT_EQ(z.runs[0].diagnostics.normalization.size(), 1u);
  EXPECT_EQ(z.runs[0].diagnostics.normalization[0], stats);
  const auto all = fit_normalization(
      [&] {
        auto s = raw.train_series;
        s.insert(s.end(), raw.test_series.begin(), raw.test_series.end());
        return s;
      }(),
      NormalizeMethod::kZScore);
  EXPECT_NE(stats, all);
}

TEST(Suite, AggregatesWithSampleStd) {
  const auto& r = tiny_report();
  const auto& base = r.techniques[index_of(r, "baseline")];
  for (const auto& t : r.techniques) {
    const double a = t.runs[0].rmse, b = t.runs[1].rmse;
    EXPECT_DOUBLE_EQ(t.mean, (a + b) / 2);
    EXPECT_NEAR(t.std, std::abs(a - b) / std::sqrt(2.0), 1e-12);
    ASSERT_TRUE(t.improvement_pct.has_value());
    EXPECT_NEAR(*t.improvement_pct, 100.0 * (base.mean - t.mean) / base.mean, 1e-9);
  }
  EXPECT_EQ(*base.improvement_pct, 0.0);
}

TEST(Suite, WorkerCountDoesNotChangeResults) {
  const auto suite = suite_from_json(tiny_suite_json());
  const auto a = report_to_json(tiny_report());
  const auto b = report_to_json(run_suite(suite, 3));
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Suite, RequiresBaseline) {
  auto j = tiny_suite_json();
  j["techniques"].erase(0);
  EXPECT_THROW(run_suite(suite_from_json(j), 1), ConfigError);
}

TEST(Suite, DegenerateChannelFailsTechniqueWithStageTag) {
  // a straight line has constant specific force, so zscore cannot be fitted
  auto j = tiny_suite_json("line");
  j["techniques"] = json::parse(R"([{"type": "baseline"},
      {"name": "zscore", "type": "preprocess", "steps": [{"op": "normalize"}]}])");
  j["dataset"]["synthetic"].erase("noise_acc");
  j["dataset"]["synthetic"].erase("noise_gyro");
  j["repetitions"] = 1;
  const auto suite = suite_from_json(j);
  const auto cfg = experiment_config(suite, 1);
  try {
    run_experiment(cfg, 5);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "preprocess");
    try {
      std::rethrow_if_nested(e);
      FAIL() << "no nested error";
    } catch (const DegenerateChannelError& inner) {
      EXPECT_EQ(inner.channel(), 0u);
    }
  }
  const auto report = run_suite(suite, 1);
  EXPECT_FALSE(report.techniques[0].failed);
  EXPECT_TRUE(report.techniques[1].failed);
  EXPECT_TRUE(report.any_failed());
  const auto jr = report_to_json(report);
  EXPECT_NO_THROW(validate_report_json(jr));
  EXPECT_TRUE(jr["techniques"][1]["mean"].is_null());
  EXPECT_TRUE(jr["techniques"][1]["rmse_runs"][0].is_null());
  EXPECT_NE(jr["techniques"][1]["errors"][0]["message"].get<std::string>().find("[preprocess]"), std::string::npos);
}

TEST(Report, JsonSchemaViolationsDetected) {
  const auto good = report_to_json(tiny_report());
  EXPECT_NO_THROW(validate_report_json(good));
  auto bad = good;
  bad["techniques"][0].erase("mean");
  EXPECT_THROW(validate_report_json(bad), DataError);
  bad = good;
  bad["techniques"][0]["rmse_runs"].push_back(1.0);
  EXPECT_THROW(validate_report_json(bad), DataError);
  bad = good;
  bad["format"] = "other";
  EXPECT_THROW(validate_report_json(bad), DataError);
  bad = good;
  bad["techniques"][1]["failed_runs"] = 1;
  EXPECT_THROW(validate_report_json(bad), DataError);
}

TEST(Report, CsvAndSvgContract) {
  const auto rows = report_rows(tiny_report());
  const auto csv = render_csv(rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "technique,mean_rmse,std_rmse,improvement_pct,successful_runs,failed_runs,status");
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
  }
  EXPECT_EQ(n, rows.size());
  const auto svg = render_svg(rows);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  std::size_t bars = 0;
  for (auto p = svg.find("class=\"bar "); p != std::string::npos; p = svg.find("class=\"bar ", p + 1)) ++bars;
  EXPECT_EQ(bars, rows.size() - 1);  // baseline has no bar
  EXPECT_EQ(render_csv(report_rows(report_to_json(tiny_report()))), csv);
}

TEST(Report, SignedPercent) {
  EXPECT_EQ(signed_percent(7.0), "+7.00%");
  EXPECT_EQ(signed_percent(-2.345), "-2.35%");
  EXPECT_EQ(signed_percent(0.0), "+0.00%");
}

TEST(Report, UnwritableDirectoryIsIoError) {
  const auto dir = scratch_dir("ro");
  const auto file = dir / "not_a_dir";
  std::ofstream(file) << "x";
  EXPECT_THROW(emit_outputs(tiny_report(), file / "sub", {"json"}), IoError);
}

TEST(Checkpoint, RoundTripIsExact) {
  auto mc = ModelConfig{};
  mc.head_mode = HeadMode::kHead2;
  mc.filters = 3;
  mc.lstm_hidden = 4;
  mc.fc_width = 5;
  mc.output_dim = 2;
  Rng rng(12);
  Checkpoint ck;
  ck.model = mc;
  ck.parameters = build_model(mc, rng);
  ck.meta = json{{"technique", "head2"}, {"seed", 7}};
  const auto dir = scratch_dir("ckpt");
  save_checkpoint(dir / "c.json", ck);
  const auto back = load_checkpoint(dir / "c.json");
  EXPECT_EQ(back.model, mc);
  EXPECT_EQ(parameter_hash(back.parameters), parameter_hash(ck.parameters));
  EXPECT_EQ(back.meta, ck.meta);
}

TEST(Checkpoint, CorruptFilesRejected) {
  auto mc = ModelConfig{};
  mc.filters = 2;
  mc.lstm_hidden = 2;
  mc.fc_width = 2;
  Rng rng(1);
  Checkpoint ck;
  ck.model = mc;
  ck.parameters = build_model(mc, rng);
  auto j = checkpoint_to_json(ck);
  j["parameters"]["fc.bias"].erase(0);
  EXPECT_THROW(checkpoint_from_json(j), DataError);
  j = checkpoint_to_json(ck);
  j["version"] = 99;
  EXPECT_THROW(checkpoint_from_json(j), DataError);
  j = checkpoint_to_json(ck);
  j["parameters"].erase("lstm.backward.bias");
  EXPECT_THROW(checkpoint_from_json(j), DataError);
}

TEST(Cli, TrainEvalAndReport) {
  const auto dir = scratch_dir("cli");
  {
    auto j = tiny_suite_json();
    j["repetitions"] = 1;
    std::ofstream(dir / "suite.json") << j.dump(2);
  }
  const std::string cfg = (dir / "suite.json").string();
  const std::string ck = (dir / "ck.json").string();
  ASSERT_EQ(run_cli("train --config " + cfg + " --technique head3 --seed 4 --checkpoint " + ck), 0);
  const auto meta = load_checkpoint(ck).meta;
  EXPECT_EQ(meta["technique"], "head3");
  ASSERT_EQ(run_cli("eval --config " + cfg + " --checkpoint " + ck), 0);

  ASSERT_EQ(run_cli("bench --quiet --config " + cfg + " --out " + (dir / "out").string()), 0);
  for (const char* f : {"report.json", "report.csv", "improvement.svg", "timing.json"}) EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  ASSERT_EQ(run_cli("report --in " + (dir / "out" / "report.json").string() + " --out " + (dir / "re").string()), 0);
  EXPECT_EQ(slurp(dir / "re" / "report.csv"), slurp(dir / "out" / "report.csv"));
  EXPECT_EQ(slurp(dir / "re" / "improvement.svg"), slurp(dir / "out" / "improvement.svg"));
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir("exit");
  auto j = tiny_suite_json("line");
  j["techniques"] = json::parse(R"([{"type": "baseline"}, {"name": "z", "type": "preprocess", "steps": [{"op": "normalize"}]}])");
  j["dataset"]["synthetic"].erase("noise_acc");
  j["dataset"]["synthetic"].erase("noise_gyro");
  j["repetitions"] = 1;
  std::ofstream(dir / "fail.json") << j.dump();
  EXPECT_EQ(run_cli("bench --quiet --config " + (dir / "fail.json").string() + " --out " + (dir / "o").string()), 2);
  EXPECT_TRUE(fs::exists(dir / "o" / "report.json"));
  j["bogus"] = true;
  std::ofstream(dir / "bad.json") << j.dump();
  EXPECT_EQ(run_cli("bench --quiet --config " + (dir / "bad.json").string() + " --out " + (dir / "o2").string()), 1);
  EXPECT_EQ(run_cli("synth --kind line --duration 2 --out " + (dir / "syn").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "syn" / "imu.csv"));
}

TEST(Cli, FileDatasetMatchesSynthetic) {
  // the same recording supplied as CSV files gives the same result as the in-memory generator
  const auto dir = scratch_dir("files");
  ASSERT_EQ(run_cli("synth --kind circle_line --duration 12 --noise-acc 0.02 --noise-gyro 0.0005 --seed 3 --out " +
                    (dir / "syn").string()),
            0);
  auto j = tiny_suite_json();
  j["dataset"].erase("synthetic");
  j["dataset"]["imu"] = "syn/imu.csv";
  j["dataset"]["gt"] = "syn/gt_pos.csv";
  j["techniques"] = json::parse(R"([{"type": "baseline"}])");
  j["repetitions"] = 1;
  std::ofstream(dir / "files.json") << j.dump();
  const auto from_files = run_suite(load_suite_config(dir / "files.json"), 1);
  EXPECT_EQ(from_files.techniques[0].runs[0].rmse, tiny_report().techniques[0].runs[0].rmse);
}
