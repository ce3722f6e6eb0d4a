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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stabilis/analysis.hpp"
#include "stabilis/fitting.hpp"
#include "stabilis/geometry.hpp"
#include "stabilis/losses.hpp"
#include "stabilis/metrics.hpp"
#include "stabilis/volumetrics.hpp"

namespace stabilis::io {

using Json = nlohmann::ordered_json;

/// Throws kIoError (naming the path) or kParseError.
Json read_json(const std::filesystem::path& path);
/// Two-space indented with scalar arrays kept on one line; trailing newline.
std::string dump_json(const Json& j);
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

Json to_json(const Vec2& v);
Json to_json(const Vec3& v);
Json to_json(const Points2& pts);
Json to_json(const Points3& pts);
Vec2 vec2_from_json(const Json& j, const std::string& what);
Vec3 vec3_from_json(const Json& j, const std::string& what);

/// {"point_on_plane": [x, y, z], "up_normal": [x, y, z]}
GroundFrame ground_from_json(const Json& j);
Json to_json(const GroundFrame& frame);
GroundFrame read_ground(const std::filesystem::path& path);

/// {"variant": "full_perspective" | "weak_perspective", "fx", "fy", "ox",
///  "oy", "R": 3x3 rows, "t", "scale", "weak_translation"}
Camera camera_from_json(const Json& j);
Json to_json(const Camera& cam);
Camera read_camera(const std::filesystem::path& path);

/// {"n_parts": N, "face_labels": [...]}
PartSegmentation segmentation_from_json(const Json& j, const Mesh& mesh);
Json segmentation_to_json(int num_parts, const std::vector<int>& labels);
PartSegmentation read_segmentation(const std::filesystem::path& path, const Mesh& mesh);

/// {"pressure": {"alpha", "gamma"}, "pull": {"amplitude", "scale"},
///  "push": {...}, "weights": {"stability", "ground"}}; missing keys keep
/// the defaults of `base`.
LossConfig loss_from_json(const Json& j, const LossConfig& base = {});
Json to_json(const LossConfig& cfg);
/// A preset name ("regression", "optimization") or a path to a JSON profile.
LossConfig resolve_profile(const std::string& name_or_path);

Json to_json(const BodyPose& pose);
BodyPose pose_from_json(const Json& j);

/// Loss settings come from "profile" (name or path, resolved relative to the
/// problem file) overlaid with an optional "loss" object.
FitProblem fit_problem_from_json(const Json& j,
                                 const std::filesystem::path& base_dir = {});
Json to_json(const FitProblem& problem, const std::string& profile_name = "");
FitProblem read_fit_problem(const std::filesystem::path& path);

std::string hull_kind_name(HullKind kind);
Json to_json(const StabilityReport& report);
Json bos_to_json(const BaseOfSupport& bos, const GroundFrame& frame);

/// iteration,stage,energy,keypoint,stability,ground,step
std::string trace_csv(const std::vector<TraceEntry>& trace);
Json fit_result_to_json(const FitResult& result);

/// Shortest round-trip text for a double (matches the JSON writer).
std::string format_double(double v);

}  // namespace stabilis::io
