// Copyright 2026 The Stabilis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stabilis/cli.hpp"
#include "stabilis/io.hpp"
#include "stabilis/mesh_io.hpp"

namespace stabilis {
namespace {

namespace fs = std::filesystem;
using io::Json;
using testing::error_code_of;

const fs::path kFixtures = fs::path(STABILIS_SOURCE_DIR) / "data/fixtures";

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stabilis_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunResult analyze(const std::string& fixture, const fs::path& out,
                    std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"analyze",
                                     "--mesh", (kFixtures / fixture / "mesh.obj").string(),
                                     "--seg", (kFixtures / "toy_seg.json").string(),
                                     "--ground", (kFixtures / "ground.json").string(),
                                     "--seed", "7", "--out", out.string()};
    if (fixture == "standing") args.insert(args.end(), {"--mirror", "x,y"});
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
  }

  fs::path dir_;
};

TEST(ParseMirrorAxes, Tokens) {
  EXPECT_EQ(cli::parse_mirror_axes(""), std::vector<int>{});
  EXPECT_EQ(cli::parse_mirror_axes("x,y"), (std::vector<int>{0, 1}));
  EXPECT_EQ(cli::parse_mirror_axes("z"), std::vector<int>{2});
  EXPECT_EQ(error_code_of([] { cli::parse_mirror_axes("x,w"); }), ErrorCode::kInvalidArgument);
}

TEST(ResolveThreads, ArgumentThenEnvironment) {
  EXPECT_EQ(cli::resolve_threads(3), 3);
  ::setenv("STABILIS_THREADS", "5", 1);
  EXPECT_EQ(cli::resolve_threads(0), 5);
  ::setenv("STABILIS_THREADS", "zero", 1);
  EXPECT_EQ(error_code_of([] { cli::resolve_threads(0); }), ErrorCode::kInvalidArgument);
  ::unsetenv("STABILIS_THREADS");
  EXPECT_EQ(cli::resolve_threads(0), 1);
}

TEST(Run, HelpAndUsageErrors) {
  const RunResult help = run_cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("analyze"), std::string::npos);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"analyze", "--mesh"}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
}

TEST_F(CliTest, AnalyzeStandingFixture) {
  const RunResult r = analyze("standing", dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"report.json", "bos.json", "pressure.csv", "pressure.pgm"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  const Json rep = io::read_json(dir_ / "report.json");
  EXPECT_TRUE(rep["is_stable"].get<bool>());
  EXPECT_EQ(rep["bose"].get<int>(), 1);
  EXPECT_EQ(rep["losses"]["push"].get<double>(), 0.0);
  EXPECT_LT(rep["losses"]["stability"].get<double>(), 1e-9);

  // Independent recomputation of the ground term from the same samples.
  const Mesh mesh = read_mesh(kFixtures / "standing/mesh.obj");
  SamplingOptions opts;
  opts.mirror_axes = {0, 1};
  const SurfaceRegressor reg = sample_surface(mesh, 2000, 7, opts);
  const double oracle = testing::straight_line_ground(
      testing::straight_line_samples(reg, mesh.vertices()), Vec3::Zero(), Vec3::UnitZ(),
      LossConfig::regression());
  EXPECT_NEAR(rep["losses"]["ground"].get<double>(), oracle, 1e-12);

  const std::string pgm = slurp(dir_ / "pressure.pgm");
  EXPECT_EQ(pgm.substr(0, 2), "P5");
  const std::string csv = slurp(dir_ / "pressure.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,y,pressure");
}

TEST_F(CliTest, AnalyzeLeaningAndTilted) {
  for (const char* fixture : {"leaning", "tilted"}) {
    const fs::path out = dir_ / fixture;
    const RunResult r = analyze(fixture, out);
    ASSERT_EQ(r.code, 0) << r.err;
    const Json rep = io::read_json(out / "report.json");
    EXPECT_FALSE(rep["is_stable"].get<bool>()) << fixture;
    EXPECT_EQ(rep["bose"].get<int>(), 0) << fixture;
  }
}

TEST_F(CliTest, AnalyzeCameraFrameMesh) {
  const Camera cam = io::read_camera(kFixtures / "camera.json");
  const Mesh world = read_mesh(kFixtures / "leaning/mesh.obj");
  Points3 v;
  for (const Vec3& p : world.vertices()) v.push_back(cam.rotation * p + cam.translation);
  write_obj(dir_ / "cam.obj", world.with_vertices(v));
  const RunResult r = run_cli({"analyze", "--mesh", (dir_ / "cam.obj").string(), "--seg",
                               (kFixtures / "toy_seg.json").string(), "--camera",
                               (kFixtures / "camera.json").string(), "--out",
                               (dir_ / "a").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(run_cli({"analyze", "--mesh", (kFixtures / "leaning/mesh.obj").string(), "--seg",
                     (kFixtures / "toy_seg.json").string(), "--out", (dir_ / "b").string()})
                .code,
            0);
  const Json a = io::read_json(dir_ / "a/report.json");
  const Json b = io::read_json(dir_ / "b/report.json");
  EXPECT_EQ(a["is_stable"], b["is_stable"]);
  EXPECT_NEAR(a["losses"]["stability"].get<double>(), b["losses"]["stability"].get<double>(), 1e-9);
}

TEST_F(CliTest, AnalyzeMissingSegmentationNamesPath) {
  const std::string missing = (dir_ / "nope_seg.json").string();
  const RunResult r = run_cli({"analyze", "--mesh", (kFixtures / "standing/mesh.obj").string(),
                               "--seg", missing, "--out", dir_.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(missing), std::string::npos) << r.err;
}

TEST_F(CliTest, AnalyzeSegmentationMismatchIsValidationError) {
  std::ofstream(dir_ / "seg.json") << R"({"n_parts": 2, "face_labels": [0, 1]})";
  const RunResult r = run_cli({"analyze", "--mesh", (kFixtures / "standing/mesh.obj").string(),
                               "--seg", (dir_ / "seg.json").string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, FitKeypointOnly) {
  const RunResult r =
      run_cli({"fit", (kFixtures / "fit/keypoint_only.json").string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"fit_result.json", "energy_trace.csv", "final_mesh.obj",
                        "report_before.json", "report_after.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  std::istringstream csv(slurp(dir_ / "energy_trace.csv"));
  std::string line;
  std::getline(csv, line);
  double prev = 1e300;
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string it, stage, energy;
    std::getline(row, it, ',');
    std::getline(row, stage, ',');
    std::getline(row, energy, ',');
    EXPECT_EQ(stage, "0");
    EXPECT_LE(std::stod(energy), prev);
    prev = std::stod(energy);
    ++rows;
  }
  EXPECT_GT(rows, 1);
  const Json res = io::read_json(dir_ / "fit_result.json");
  EXPECT_EQ(res["iterations"].get<int>() + 1, rows);
}

TEST_F(CliTest, FitHoveringLands) {
  const RunResult r =
      run_cli({"fit", "--problem", (kFixtures / "fit/hovering.json").string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json after = io::read_json(dir_ / "report_after.json");
  EXPECT_LT(after["sole_mean_abs_height"].get<double>(), 0.01);
  const Json before = io::read_json(dir_ / "report_before.json");
  EXPECT_NEAR(before["sole_mean_abs_height"].get<double>(), 0.1, 1e-9);
}

TEST_F(CliTest, FitMalformedAndNumericalFailures) {
  std::ofstream(dir_ / "bad.json") << "{\"keypoints\": [1, 2,";
  EXPECT_EQ(run_cli({"fit", (dir_ / "bad.json").string(), "--out", (dir_ / "o").string()}).code, 2);

  Json p = io::read_json(kFixtures / "fit/keypoint_only.json");
  p.erase("init");
  io::write_json(dir_ / "noinit.json", p);
  EXPECT_EQ(run_cli({"fit", (dir_ / "noinit.json").string(), "--out", (dir_ / "o").string()}).code, 2);

  p = io::read_json(kFixtures / "fit/keypoint_only.json");
  p["init"]["root_translation"] = {0.0, -10.0, 0.0};
  io::write_json(dir_ / "behind.json", p);
  const RunResult behind =
      run_cli({"fit", (dir_ / "behind.json").string(), "--out", (dir_ / "o").string()});
  EXPECT_EQ(behind.code, 3) << behind.err;
}

TEST_F(CliTest, EvalFixtureSet) {
  const RunResult r = run_cli({"eval", "--pred", (kFixtures / "eval/pred").string(), "--ref",
                               (kFixtures / "eval/ref").string(), "--seg",
                               (kFixtures / "toy_seg.json").string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json s = io::read_json(dir_ / "summary.json");
  EXPECT_EQ(s["num_frames"].get<int>(), 3);
  EXPECT_NEAR(s["bose_percent"].get<double>(), 200.0 / 3.0, 1e-9);
  EXPECT_NEAR(s["bose_percent_ref"].get<double>(), 100.0, 1e-9);
  EXPECT_TRUE(s.contains("mean_mpjpe_mm"));
  const std::string csv = slurp(dir_ / "eval.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "name,bose_pred,bose_ref,com_error_mm,cop_error_mm,pressure_iou,mpjpe_mm,pa_mpjpe_mm,pve_mm");
}

TEST_F(CliTest, EvalIdenticalCopies) {
  cli::EvalArgs a;
  a.pred = kFixtures / "eval/ref";
  a.ref = kFixtures / "eval/ref";
  a.seg = kFixtures / "toy_seg.json";
  a.out = dir_;
  const auto records = cli::cmd_eval(a);
  ASSERT_EQ(records.size(), 3u);
  for (const EvalRecord& e : records) {
    EXPECT_EQ(e.bose_pred, e.bose_ref);
    EXPECT_EQ(e.com_error_mm, 0.0);
    EXPECT_EQ(e.cop_error_mm, 0.0);
    EXPECT_EQ(e.pressure_iou, 1.0);
    EXPECT_EQ(*e.mpjpe_mm, 0.0);
    EXPECT_LT(*e.pa_mpjpe_mm, 1e-6);
    EXPECT_EQ(*e.pve_mm, 0.0);
  }
}

TEST_F(CliTest, EvalSharedRigidPlacementLeavesComCopErrors) {
  // Move pred and ref by the same in-plane rigid motion.
  const Mat3 r = Eigen::AngleAxisd(0.9, Vec3::UnitZ()).toRotationMatrix();
  const Vec3 t(0.4, -1.3, 0.0);
  for (const char* side : {"pred", "ref"}) {
    fs::create_directories(dir_ / side);
    for (const char* stem : {"frame_000", "frame_002"}) {
      const Mesh m = read_mesh(kFixtures / "eval" / side / (std::string(stem) + ".obj"));
      Points3 v;
      for (const Vec3& p : m.vertices()) v.push_back(r * p + t);
      write_obj(dir_ / side / (std::string(stem) + ".obj"), m.with_vertices(v));
    }
  }
  fs::create_directories(dir_ / "orig/pred");
  fs::create_directories(dir_ / "orig/ref");
  for (const char* side : {"pred", "ref"})
    for (const char* stem : {"frame_000.obj", "frame_002.obj"})
      fs::copy_file(kFixtures / "eval" / side / stem, dir_ / "orig" / side / stem);
  cli::EvalArgs moved, orig;
  moved.pred = dir_ / "pred";
  moved.ref = dir_ / "ref";
  orig.pred = dir_ / "orig/pred";
  orig.ref = dir_ / "orig/ref";
  moved.seg = orig.seg = kFixtures / "toy_seg.json";
  moved.out = dir_ / "out_moved";
  orig.out = dir_ / "out_orig";
  const auto a = cli::cmd_eval(moved);
  const auto b = cli::cmd_eval(orig);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i].com_error_mm, b[i].com_error_mm, 1e-6);
    EXPECT_NEAR(a[i].cop_error_mm, b[i].cop_error_mm, 1e-6);
    EXPECT_EQ(a[i].bose_pred, b[i].bose_pred);
  }
}

TEST_F(CliTest, EvalErrors) {
  fs::create_directories(dir_ / "p");
  fs::create_directories(dir_ / "r");
  const auto eval = [&] {
    return run_cli({"eval", "--pred", (dir_ / "p").string(), "--ref", (dir_ / "r").string(),
                    "--seg", (kFixtures / "toy_seg.json").string(), "--out", (dir_ / "o").string()});
  };
  EXPECT_EQ(eval().code, 2);
  fs::copy_file(kFixtures / "eval/pred/frame_000.obj", dir_ / "p/frame_000.obj");
  fs::copy_file(kFixtures / "eval/pred/frame_001.obj", dir_ / "p/frame_001.obj");
  fs::copy_file(kFixtures / "eval/ref/frame_000.obj", dir_ / "r/frame_000.obj");
  const RunResult unpaired = eval();
  EXPECT_EQ(unpaired.code, 2);
  EXPECT_NE(unpaired.err.find("frame_001"), std::string::npos) << unpaired.err;
}

TEST_F(CliTest, EvalThreadCountDoesNotChangeOutput) {
  for (const char* n : {"1", "3"}) {
    const RunResult r = run_cli({"eval", "--threads", n, "--pred",
                                 (kFixtures / "eval/pred").string(), "--ref",
                                 (kFixtures / "eval/ref").string(), "--seg",
                                 (kFixtures / "toy_seg.json").string(), "--out",
                                 (dir_ / n).string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(dir_ / "1/eval.csv"), slurp(dir_ / "3/eval.csv"));
  EXPECT_EQ(slurp(dir_ / "1/summary.json"), slurp(dir_ / "3/summary.json"));
}

TEST_F(CliTest, SampleWritesLoadableMatrix) {
  const fs::path w = dir_ / "w.bin";
  const RunResult r = run_cli({"sample", "--mesh", (kFixtures / "standing/mesh.obj").string(),
                               "--n-samples", "400", "--seed", "3", "--mirror", "x,y", "--out",
                               w.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Mesh mesh = read_mesh(kFixtures / "standing/mesh.obj");
  SamplingOptions opts;
  opts.mirror_axes = {0, 1};
  const auto loaded = read_regressor(w, mesh, regressor_cache_key(mesh, 400, 3, opts));
  ASSERT_TRUE(loaded.has_value());
  EXPECT_EQ(loaded->weights(), sample_surface(mesh, 400, 3, opts).weights());
}

#ifdef STABILIS_FIXTURE_TOOL
TEST_F(CliTest, ShippedFixturesAreReproducible) {
  const std::string cmd = std::string(STABILIS_FIXTURE_TOOL) + " " + dir_.string() + " > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(kFixtures)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), kFixtures);
    ASSERT_TRUE(fs::exists(dir_ / rel)) << rel;
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / rel)) << rel;
    ++compared;
  }
  EXPECT_GT(compared, 10u);
}
#endif

}  // namespace
}  // namespace stabilis
