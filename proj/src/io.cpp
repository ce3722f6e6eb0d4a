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

#include "stabilis/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "stabilis/error.hpp"

namespace stabilis::io {

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

namespace {

bool is_flat_array(const Json& j) {
  if (!j.is_array()) return false;
  for (const Json& v : j) {
    if (v.is_structured()) return false;
  }
  return true;
}

// Pretty printer that keeps arrays of scalars on one line.
void emit(std::ostringstream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(indent), ' ');
  if (is_flat_array(j)) {
    os << j.dump();
  } else if (j.is_array()) {
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      os << pad;
      emit(os, j[i], indent + 2);
      os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << close_pad << ']';
  } else if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      os << pad << Json(it.key()).dump() << ": ";
      emit(os, it.value(), indent + 2);
      os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << close_pad << '}';
  } else {
    os << j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::ostringstream os;
  emit(os, j, 0);
  os << '\n';
  return os.str();
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, dump_json(j));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::kParseError, what);
}

const Json& field(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) bad(ctx + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  return j.get<double>();
}

double number_or(const Json& j, const char* key, double fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  return number(j.at(key), ctx + "." + key);
}

template <int N>
Eigen::Matrix<double, N, 1> vec_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != N) {
    bad(what + " must be an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = number(j[i], what);
  return v;
}

}  // namespace

Json to_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }
Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }
Json to_json(const Points2& pts) {
  Json a = Json::array();
  for (const Vec2& p : pts) a.push_back(to_json(p));
  return a;
}
Json to_json(const Points3& pts) {
  Json a = Json::array();
  for (const Vec3& p : pts) a.push_back(to_json(p));
  return a;
}
Vec2 vec2_from_json(const Json& j, const std::string& what) { return vec_from_json<2>(j, what); }
Vec3 vec3_from_json(const Json& j, const std::string& what) { return vec_from_json<3>(j, what); }

GroundFrame ground_from_json(const Json& j) {
  const Vec3 point =
      vec3_from_json(field(j, "point_on_plane", "ground"), "ground.point_on_plane");
  const Vec3 normal = vec3_from_json(field(j, "up_normal", "ground"), "ground.up_normal");
  return GroundFrame(point, normal);
}

Json to_json(const GroundFrame& frame) {
  Json j;
  j["point_on_plane"] = to_json(frame.point_on_plane());
  j["up_normal"] = to_json(frame.up_normal());
  return j;
}

GroundFrame read_ground(const std::filesystem::path& path) {
  return ground_from_json(read_json(path));
}

Camera camera_from_json(const Json& j) {
  Camera cam;
  const std::string model = j.value("variant", std::string("full_perspective"));
  if (model == "full_perspective") {
    cam.model = CameraModel::kFullPerspective;
  } else if (model == "weak_perspective") {
    cam.model = CameraModel::kWeakPerspective;
  } else {
    bad("camera.variant must be full_perspective or weak_perspective, got " + model);
  }
  cam.fx = number(field(j, "fx", "camera"), "camera.fx");
  cam.fy = number(field(j, "fy", "camera"), "camera.fy");
  cam.ox = number_or(j, "ox", 0.0, "camera");
  cam.oy = number_or(j, "oy", 0.0, "camera");
  if (j.contains("R")) {
    const Json& r = j.at("R");
    if (!r.is_array() || r.size() != 3) bad("camera.R must be 3 rows");
    for (int i = 0; i < 3; ++i) {
      cam.rotation.row(i) = vec3_from_json(r[i], "camera.R row").transpose();
    }
  }
  if (j.contains("t")) cam.translation = vec3_from_json(j.at("t"), "camera.t");
  cam.scale = number_or(j, "scale", 1.0, "camera");
  if (j.contains("weak_translation")) {
    cam.weak_translation = vec2_from_json(j.at("weak_translation"), "camera.weak_translation");
  }
  cam.validate();
  return cam;
}

Json to_json(const Camera& cam) {
  Json j;
  j["variant"] = cam.model == CameraModel::kFullPerspective ? "full_perspective"
                                                          : "weak_perspective";
  j["fx"] = cam.fx;
  j["fy"] = cam.fy;
  j["ox"] = cam.ox;
  j["oy"] = cam.oy;
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(to_json(Vec3(cam.rotation.row(i).transpose())));
  j["R"] = rows;
  j["t"] = to_json(cam.translation);
  if (cam.model == CameraModel::kWeakPerspective) {
    j["scale"] = cam.scale;
    j["weak_translation"] = to_json(cam.weak_translation);
  }
  return j;
}

Camera read_camera(const std::filesystem::path& path) {
  return camera_from_json(read_json(path));
}

PartSegmentation segmentation_from_json(const Json& j, const Mesh& mesh) {
  const Json& n = field(j, "n_parts", "segmentation");
  const Json& labels = field(j, "face_labels", "segmentation");
  if (!n.is_number_integer()) bad("segmentation.n_parts must be an integer");
  if (!labels.is_array()) bad("segmentation.face_labels must be an array");
  std::vector<int> l;
  l.reserve(labels.size());
  for (const Json& v : labels) {
    if (!v.is_number_integer()) bad("segmentation.face_labels must be integers");
    l.push_back(v.get<int>());
  }
  return PartSegmentation(mesh, n.get<int>(), std::move(l));
}

Json segmentation_to_json(int num_parts, const std::vector<int>& labels) {
  Json j;
  j["n_parts"] = num_parts;
  j["face_labels"] = labels;
  return j;
}

PartSegmentation read_segmentation(const std::filesystem::path& path, const Mesh& mesh) {
  return segmentation_from_json(read_json(path), mesh);
}

LossConfig loss_from_json(const Json& j, const LossConfig& base) {
  if (!j.is_object()) bad("loss profile must be an object");
  LossConfig c = base;
  if (j.contains("pressure")) {
    const Json& p = j.at("pressure");
    c.pressure.alpha = number_or(p, "alpha", c.pressure.alpha, "pressure");
    c.pressure.gamma = number_or(p, "gamma", c.pressure.gamma, "pressure");
  }
  if (j.contains("pull")) {
    const Json& p = j.at("pull");
    c.pull_amplitude = number_or(p, "amplitude", c.pull_amplitude, "pull");
    c.pull_scale = number_or(p, "scale", c.pull_scale, "pull");
  }
  if (j.contains("push")) {
    const Json& p = j.at("push");
    c.push_amplitude = number_or(p, "amplitude", c.push_amplitude, "push");
    c.push_scale = number_or(p, "scale", c.push_scale, "push");
  }
  if (j.contains("weights")) {
    const Json& w = j.at("weights");
    c.stability_weight = number_or(w, "stability", c.stability_weight, "weights");
    c.ground_weight = number_or(w, "ground", c.ground_weight, "weights");
  }
  c.validate();
  return c;
}

Json to_json(const LossConfig& c) {
  Json j;
  j["pressure"] = {{"alpha", c.pressure.alpha}, {"gamma", c.pressure.gamma}};
  j["pull"] = {{"amplitude", c.pull_amplitude}, {"scale", c.pull_scale}};
  j["push"] = {{"amplitude", c.push_amplitude}, {"scale", c.push_scale}};
  j["weights"] = {{"stability", c.stability_weight}, {"ground", c.ground_weight}};
  return j;
}

LossConfig resolve_profile(const std::string& name_or_path) {
  if (name_or_path == "regression" || name_or_path == "optimization") {
    return LossConfig::profile(name_or_path);
  }
  return loss_from_json(read_json(name_or_path));
}

Json to_json(const BodyPose& pose) {
  Json j;
  j["root_rotation"] = to_json(pose.root_rotation);
  j["root_translation"] = to_json(pose.root_translation);
  Json rots = Json::array();
  for (const Vec3& w : pose.joint_rotations) rots.push_back(to_json(w));
  j["joint_rotations"] = rots;
  return j;
}

BodyPose pose_from_json(const Json& j) {
  BodyPose p;
  p.root_rotation = vec3_from_json(field(j, "root_rotation", "pose"), "pose.root_rotation");
  p.root_translation =
      vec3_from_json(field(j, "root_translation", "pose"), "pose.root_translation");
  const Json& rots = field(j, "joint_rotations", "pose");
  if (!rots.is_array()) bad("pose.joint_rotations must be an array");
  for (const Json& w : rots) p.joint_rotations.push_back(vec3_from_json(w, "joint rotation"));
  return p;
}

FitProblem fit_problem_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) bad("fit problem must be an object");
  FitProblem p;
  if (j.contains("body")) {
    p.body.resolution = j.at("body").value("resolution", p.body.resolution);
  }
  const Json& kp = field(j, "keypoints", "problem");
  if (!kp.is_array()) bad("problem.keypoints must be an array");
  for (const Json& k : kp) p.targets.points.push_back(vec2_from_json(k, "keypoint"));
  if (j.contains("confidence")) {
    const Json& c = j.at("confidence");
    if (!c.is_array()) bad("problem.confidence must be an array");
    for (const Json& v : c) p.targets.confidence.push_back(number(v, "confidence"));
  } else {
    p.targets.confidence.assign(p.targets.points.size(), 1.0);
  }
  p.camera = camera_from_json(field(j, "camera", "problem"));
  p.ground = ground_from_json(field(j, "ground", "problem"));
  if (j.contains("profile")) {
    const std::string name = j.at("profile").get<std::string>();
    const bool preset = name == "regression" || name == "optimization";
    p.loss = resolve_profile(preset ? name : (base_dir / name).string());
  }
  if (j.contains("loss")) p.loss = loss_from_json(j.at("loss"), p.loss);
  p.init = pose_from_json(field(j, "init", "problem"));
  if (j.contains("optimizer")) {
    const Json& o = j.at("optimizer");
    OptimizerSettings& s = p.optimizer;
    s.initial_step = number_or(o, "initial_step", s.initial_step, "optimizer");
    s.max_iterations = o.value("max_iterations", s.max_iterations);
    s.tolerance = number_or(o, "tolerance", s.tolerance, "optimizer");
    s.warmup_iterations = o.value("warmup_iterations", s.warmup_iterations);
    s.armijo = number_or(o, "armijo", s.armijo, "optimizer");
    s.backtrack = number_or(o, "backtrack", s.backtrack, "optimizer");
    s.max_backtracks = o.value("max_backtracks", s.max_backtracks);
  }
  p.robust_scale = number_or(j, "robust_scale", p.robust_scale, "problem");
  p.num_samples = j.value("num_samples", p.num_samples);
  p.seed = j.value("seed", p.seed);
  p.tau = number_or(j, "tau", p.tau, "problem");
  return p;
}

Json to_json(const FitProblem& p, const std::string& profile_name) {
  Json j;
  j["body"] = {{"resolution", p.body.resolution}};
  j["keypoints"] = to_json(p.targets.points);
  j["confidence"] = p.targets.confidence;
  j["camera"] = to_json(p.camera);
  j["ground"] = to_json(p.ground);
  if (!profile_name.empty()) j["profile"] = profile_name;
  j["loss"] = to_json(p.loss);
  j["init"] = to_json(p.init);
  const OptimizerSettings& s = p.optimizer;
  j["optimizer"] = {{"initial_step", s.initial_step},
                    {"max_iterations", s.max_iterations},
                    {"tolerance", s.tolerance},
                    {"warmup_iterations", s.warmup_iterations},
                    {"armijo", s.armijo},
                    {"backtrack", s.backtrack},
                    {"max_backtracks", s.max_backtracks}};
  j["robust_scale"] = p.robust_scale;
  j["num_samples"] = p.num_samples;
  j["seed"] = p.seed;
  j["tau"] = p.tau;
  return j;
}

FitProblem read_fit_problem(const std::filesystem::path& path) {
  const Json j = read_json(path);
  try {
    return fit_problem_from_json(j, path.parent_path());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

std::string hull_kind_name(HullKind kind) {
  switch (kind) {
    case HullKind::kEmpty: return "empty";
    case HullKind::kPoint: return "point";
    case HullKind::kSegment: return "segment";
    case HullKind::kPolygon: return "polygon";
  }
  return "empty";
}

Json to_json(const StabilityReport& r) {
  Json j;
  j["num_samples"] = r.num_samples;
  j["tau"] = r.tau;
  j["volumes"] = {{"per_part", r.volumes.per_part}, {"total", r.volumes.total}};
  j["com"] = {{"part", to_json(r.com_part)},
              {"naive", to_json(r.com_naive)},
              {"naive_uniform", to_json(r.com_naive_uniform)},
              {"trig", to_json(r.com_trig)}};
  j["cop"] = to_json(r.cop);
  j["com_plane"] = to_json(r.com_plane);
  j["cop_plane"] = to_json(r.cop_plane);
  j["bos"] = {{"kind", hull_kind_name(r.bos.kind)},
              {"num_contacts", r.bos.contacts.size()},
              {"hull", to_json(r.bos.hull)},
              {"area", polygon_area(r.bos.hull)}};
  j["is_stable"] = r.is_stable;
  j["bose"] = r.bose;
  j["losses"] = {{"stability", r.stability_loss},
                 {"ground", r.ground.total.value},
                 {"pull", r.ground.pull},
                 {"push", r.ground.push},
                 {"num_pull", r.ground.num_pull},
                 {"num_push", r.ground.num_push}};
  j["contact_mean_abs_height"] = r.contact_mean_abs_height;
  if (r.subset_mean_abs_height) j["sole_mean_abs_height"] = *r.subset_mean_abs_height;
  return j;
}

Json bos_to_json(const BaseOfSupport& bos, const GroundFrame& frame) {
  Json j;
  j["tau"] = bos.tau;
  j["frame"] = {{"point", to_json(frame.point_on_plane())},
                {"normal", to_json(frame.up_normal())},
                {"tangent_u", to_json(frame.tangent_u())},
                {"tangent_v", to_json(frame.tangent_v())}};
  j["kind"] = hull_kind_name(bos.kind);
  j["hull"] = to_json(bos.hull);
  Json world = Json::array();
  for (const Vec2& q : bos.hull) world.push_back(to_json(frame.from_plane(q)));
  j["hull_world"] = world;
  j["contacts"] = to_json(bos.contacts);
  return j;
}

std::string trace_csv(const std::vector<TraceEntry>& trace) {
  std::ostringstream os;
  os << "iteration,stage,energy,keypoint,stability,ground,step\n";
  for (const TraceEntry& t : trace) {
    os << t.iteration << ',' << t.stage << ',' << format_double(t.energy) << ','
       << format_double(t.keypoint) << ',' << format_double(t.stability) << ','
       << format_double(t.ground) << ',' << format_double(t.step) << '\n';
  }
  return os.str();
}

Json fit_result_to_json(const FitResult& r) {
  Json j;
  j["iterations"] = r.iterations;
  j["stop_reason"] = r.stop_reason;
  j["initial_energy"] = r.trace.empty() ? 0.0 : r.trace.front().energy;
  j["final_energy"] = r.trace.empty() ? 0.0 : r.trace.back().energy;
  j["final_keypoint_energy"] = r.trace.empty() ? 0.0 : r.trace.back().keypoint;
  j["initial_pose"] = to_json(r.initial);
  j["final_pose"] = to_json(r.final_pose);
  j["final_keypoints"] = to_json(r.final_keypoints);
  j["stability_loss"] = {{"before", r.before.stability_loss},
                         {"after", r.after.stability_loss}};
  if (r.before.subset_mean_abs_height && r.after.subset_mean_abs_height) {
    j["sole_mean_abs_height"] = {{"before", *r.before.subset_mean_abs_height},
                                 {"after", *r.after.subset_mean_abs_height}};
  }
  j["is_stable"] = {{"before", r.before.is_stable}, {"after", r.after.is_stable}};
  return j;
}

}  // namespace stabilis::io
