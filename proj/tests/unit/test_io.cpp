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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stabilis/io.hpp"
#include "stabilis/scenes.hpp"

namespace stabilis {
namespace {

using io::Json;
using testing::error_code_of;

const std::filesystem::path kRoot(STABILIS_SOURCE_DIR);

TEST(FormatDouble, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 123456789.125}) {
    const std::string s = io::format_double(v);
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(io::format_double(0.1), "0.1");
}

TEST(DumpJson, ScalarArraysInline) {
  Json j;
  j["v"] = {1.0, 2.5, 3.0};
  j["rows"] = Json::array({Json::array({1, 0}), Json::array({0, 1})});
  j["name"] = "x";
  const std::string s = io::dump_json(j);
  EXPECT_NE(s.find("\"v\": [1.0,2.5,3.0]"), std::string::npos) << s;
  EXPECT_NE(s.find("[1,0]"), std::string::npos) << s;
  EXPECT_EQ(Json::parse(s), j);
  EXPECT_EQ(s.back(), '\n');
}

TEST(DumpJson, DoublesRoundTripExactly) {
  Json j = Json::array();
  for (int i = 1; i < 200; ++i) j.push_back(std::sqrt(static_cast<double>(i)) * 1e-3);
  const Json back = Json::parse(io::dump_json(j));
  for (std::size_t i = 0; i < j.size(); ++i) EXPECT_EQ(back[i].get<double>(), j[i].get<double>());
}

TEST(Ground, ParseAndValidate) {
  const GroundFrame g = io::ground_from_json(
      Json::parse(R"({"point_on_plane": [0, 0, 1], "up_normal": [0, 0, 2]})"));
  EXPECT_EQ(g.point_on_plane(), Vec3(0, 0, 1));
  EXPECT_EQ(g.up_normal(), Vec3(0, 0, 1));
  const GroundFrame back = io::ground_from_json(io::to_json(g));
  EXPECT_EQ(back.up_normal(), g.up_normal());
  EXPECT_EQ(error_code_of([] { io::ground_from_json(Json::parse(R"({"up_normal": [0,0,1]})")); }),
            ErrorCode::kParseError);
  EXPECT_EQ(error_code_of([] {
              io::ground_from_json(Json::parse(R"({"point_on_plane": [0,0], "up_normal": [0,0,1]})"));
            }),
            ErrorCode::kParseError);
}

TEST(Camera, ParseAndRoundTrip) {
  const Camera c = io::read_camera(kRoot / "data/fixtures/camera.json");
  EXPECT_EQ(c.model, CameraModel::kFullPerspective);
  EXPECT_EQ(c.fx, 1000.0);
  EXPECT_EQ(c.ox, 500.0);
  EXPECT_EQ(c.translation, Vec3(0, 0.5, 3));
  const Camera back = io::camera_from_json(io::to_json(c));
  EXPECT_EQ(back.rotation, c.rotation);

  Json weak = io::to_json(c);
  weak["variant"] = "weak_perspective";
  weak["scale"] = 0.9;
  weak["weak_translation"] = {0.1, 0.2};
  const Camera w = io::camera_from_json(weak);
  EXPECT_EQ(w.model, CameraModel::kWeakPerspective);
  EXPECT_EQ(w.scale, 0.9);
  EXPECT_EQ(w.weak_translation, Vec2(0.1, 0.2));

  Json bad = io::to_json(c);
  bad["R"][0][1] = 0.5;
  EXPECT_EQ(error_code_of([&] { io::camera_from_json(bad); }), ErrorCode::kNonOrthonormalRotation);
  bad = io::to_json(c);
  bad["variant"] = "fisheye";
  EXPECT_EQ(error_code_of([&] { io::camera_from_json(bad); }), ErrorCode::kParseError);
}

TEST(Segmentation, ParseAndValidate) {
  const Mesh cube = testing::split_cube();
  const Json j = io::segmentation_to_json(2, *cube.face_parts());
  const PartSegmentation seg = io::segmentation_from_json(j, cube);
  EXPECT_EQ(seg.face_labels(), *cube.face_parts());
  Json bad = j;
  bad["face_labels"].erase(bad["face_labels"].begin());
  EXPECT_EQ(error_code_of([&] { io::segmentation_from_json(bad, cube); }),
            ErrorCode::kDimensionMismatch);
  bad = j;
  bad["n_parts"] = 1;
  EXPECT_EQ(error_code_of([&] { io::segmentation_from_json(bad, cube); }),
            ErrorCode::kInvalidArgument);
}

TEST(Profiles, ShippedFilesMatchPresets) {
  for (const char* name : {"regression", "optimization"}) {
    const LossConfig file =
        io::resolve_profile((kRoot / "data/profiles" / (std::string(name) + ".json")).string());
    const LossConfig preset = LossConfig::profile(name);
    EXPECT_EQ(io::to_json(file), io::to_json(preset)) << name;
  }
  const LossConfig partial = io::loss_from_json(Json::parse(R"({"weights": {"ground": 3}})"),
                                                LossConfig::optimization());
  EXPECT_EQ(partial.ground_weight, 3.0);
  EXPECT_EQ(partial.stability_weight, 1e4);
  EXPECT_EQ(error_code_of([] { io::resolve_profile("/no/such/profile.json"); }),
            ErrorCode::kIoError);
}

TEST(FitProblem, JsonRoundTrip) {
  const ToyBody body = ToyBody::build({1});
  FitProblem p = scenes::hovering_problem(body);
  p.body = {1};
  p.optimizer.max_iterations = 123;
  p.seed = 9;
  const Json j = io::to_json(p, "optimization");
  const FitProblem q = io::fit_problem_from_json(j, kRoot);
  EXPECT_EQ(io::to_json(q, "optimization"), j);
  EXPECT_EQ(q.optimizer.max_iterations, 123);
  EXPECT_EQ(q.init.to_vector(), p.init.to_vector());
  EXPECT_EQ(q.targets.points, p.targets.points);
}

TEST(FitProblem, ShippedFixturesParse) {
  for (const auto& e : std::filesystem::directory_iterator(kRoot / "data/fixtures/fit")) {
    const FitProblem p = io::read_fit_problem(e.path());
    const ToyBody body = ToyBody::build(p.body);
    EXPECT_NO_THROW(p.validate(body)) << e.path();
  }
}

TEST(ReadJson, ErrorsNamePath) {
  const auto dir = std::filesystem::temp_directory_path() / "stabilis_io_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{ not json";
  try {
    io::read_json(dir / "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("bad.json"), std::string::npos);
  }
  EXPECT_EQ(error_code_of([&] { io::read_json(dir / "missing.json"); }), ErrorCode::kIoError);
  std::filesystem::remove_all(dir);
}

TEST(TraceCsv, HeaderAndRows) {
  const std::vector<TraceEntry> t = {{0, 0, 2.5, 2.5, 0.0, 0.0, 0.0}, {1, 1, 1.0, 0.5, 0.1, 0.2, 0.25}};
  const std::string csv = io::trace_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,stage,energy,keypoint,stability,ground,step");
  EXPECT_NE(csv.find("1,1,1,0.5,0.1,0.2,0.25"), std::string::npos) << csv;
}

}  // namespace
}  // namespace stabilis
