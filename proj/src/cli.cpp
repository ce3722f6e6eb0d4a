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

#include "stabilis/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "stabilis/analysis.hpp"
#include "stabilis/error.hpp"
#include "stabilis/fitting.hpp"
#include "stabilis/heatmap.hpp"
#include "stabilis/io.hpp"
#include "stabilis/mesh_io.hpp"
#include "stabilis/sampling.hpp"

namespace stabilis::cli {

namespace fs = std::filesystem;
using io::Json;

std::vector<int> parse_mirror_axes(const std::string& spec) {
  std::vector<int> axes;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    if (tok == "x") {
      axes.push_back(0);
    } else if (tok == "y") {
      axes.push_back(1);
    } else if (tok == "z") {
      axes.push_back(2);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "mirror axis must be x, y or z, got " + tok);
    }
  }
  return axes;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STABILIS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<int>(v);
    throw Error(ErrorCode::kInvalidArgument,
                std::string("STABILIS_THREADS must be a positive integer, got ") + env);
  }
  return 1;
}

namespace {

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) {
    throw Error(ErrorCode::kIoError, std::string(what) + " not found: " + p.string());
  }
}

void prepare_out(const fs::path& out) {
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + out.string() + ": " + ec.message());
}

GroundFrame load_ground(const fs::path& p) {
  if (p.empty()) return GroundFrame(Vec3::Zero(), Vec3::UnitZ());
  require_file(p, "ground file");
  return io::read_ground(p);
}

PartSegmentation load_segmentation(const fs::path& p, const Mesh& mesh) {
  if (p.empty()) {
    if (!mesh.face_parts()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mesh has no part labels; pass --seg");
    }
    return PartSegmentation::from_mesh(mesh);
  }
  require_file(p, "segmentation file");
  return io::read_segmentation(p, mesh);
}

SurfaceRegressor make_regressor(const Mesh& mesh, const PartSegmentation& seg,
                                const SamplingArgs& s) {
  SamplingOptions opts;
  opts.mirror_axes = parse_mirror_axes(s.mirror);
  // Samples carry the segmentation's labels, so sample a labelled copy.
  const Mesh labelled = Mesh::trusted(mesh.vertices(), mesh.faces(), seg.face_labels());
  if (!s.cache.empty()) return load_or_sample(labelled, s.n_samples, s.seed, opts, s.cache);
  return sample_surface(labelled, s.n_samples, s.seed, opts);
}

struct Analysed {
  StabilityReport report;
  PressureGrid grid;
};

Analysed analyse_mesh(const Mesh& mesh, const PartSegmentation& seg,
                      const SurfaceRegressor& reg, const GroundFrame& ground,
                      const LossConfig& cfg, double tau, double cell) {
  Analysed a;
  a.report = analyze(mesh, seg, reg, ground, cfg, tau);
  const Points3 samples = reg.apply(mesh.vertices());
  a.grid = pressure_heatmap(ground, samples, pressure(ground, samples, cfg.pressure), cell);
  return a;
}

}  // namespace

void cmd_analyze(const AnalyzeArgs& args) {
  require_file(args.mesh, "mesh file");
  Mesh mesh = read_mesh(args.mesh);
  const PartSegmentation seg = load_segmentation(args.seg, mesh);
  const GroundFrame ground = load_ground(args.ground);
  if (!args.camera.empty()) {
    require_file(args.camera, "camera file");
    const Camera cam = io::read_camera(args.camera);
    // X = R^T (X_c - t)
    mesh = world_from_camera(mesh, cam.rotation, -(cam.rotation.transpose() * cam.translation));
  }
  const LossConfig cfg = io::resolve_profile(args.profile);
  if (!(args.cell > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--cell must be positive");
  prepare_out(args.out);

  const SurfaceRegressor reg = make_regressor(mesh, seg, args.sampling);
  const Analysed a = analyse_mesh(mesh, seg, reg, ground, cfg, args.tau, args.cell);
  Json report = io::to_json(a.report);
  report["profile"] = io::to_json(cfg);
  report["ground"] = io::to_json(ground);
  io::write_json(args.out / "report.json", report);
  io::write_json(args.out / "bos.json", io::bos_to_json(a.report.bos, ground));
  write_heatmap_csv(args.out / "pressure.csv", a.grid);
  write_heatmap_pgm(args.out / "pressure.pgm", a.grid);
}

void cmd_fit(const FitArgs& args) {
  require_file(args.problem, "fit problem");
  FitProblem problem = io::read_fit_problem(args.problem);
  if (args.seed) problem.seed = *args.seed;
  if (!args.profile.empty()) {
    const LossConfig preset = io::resolve_profile(args.profile);
    problem.loss = preset;
  }
  prepare_out(args.out);
  const ToyBody body = ToyBody::build(problem.body);
  const SurfaceRegressor reg = body.sample(problem.num_samples, problem.seed);
  FitResult result;
  try {
    result = fit(body, problem, reg);
  } catch (const FitDiverged& e) {
    io::write_text(args.out / "energy_trace.csv", io::trace_csv(e.trace()));
    throw;
  }
  io::write_json(args.out / "fit_result.json", io::fit_result_to_json(result));
  io::write_text(args.out / "energy_trace.csv", io::trace_csv(result.trace));
  write_obj(args.out / "final_mesh.obj", result.final_mesh);
  io::write_json(args.out / "report_before.json", io::to_json(result.before));
  io::write_json(args.out / "report_after.json", io::to_json(result.after));
}

namespace {

std::map<std::string, fs::path> list_meshes(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "directory not found: " + dir.string());
  }
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext != ".obj" && ext != ".ply") continue;
    const std::string stem = entry.path().stem().string();
    if (out.count(stem) != 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "two meshes share the stem " + stem + " in " + dir.string());
    }
    out[stem] = entry.path();
  }
  return out;
}

std::optional<Points3> read_joints(const fs::path& mesh_path) {
  const fs::path p = mesh_path.parent_path() / (mesh_path.stem().string() + ".joints.json");
  if (!fs::exists(p)) return std::nullopt;
  const Json j = io::read_json(p);
  if (!j.is_object() || !j.contains("joints") || !j.at("joints").is_array()) {
    throw Error(ErrorCode::kParseError, p.string() + ": expected {\"joints\": [[x, y, z], ...]}");
  }
  Points3 pts;
  for (const Json& v : j.at("joints")) pts.push_back(io::vec3_from_json(v, "joint"));
  return pts;
}

bool same_topology(const Mesh& a, const Mesh& b) {
  return a.num_vertices() == b.num_vertices() && a.faces() == b.faces();
}

EvalRecord evaluate_pair(const std::string& name, const fs::path& pred_path,
                         const fs::path& ref_path, const EvalArgs& args,
                         const GroundFrame& ground, const LossConfig& cfg) {
  const Mesh ref = read_mesh(ref_path);
  const Mesh pred = read_mesh(pred_path);
  const PartSegmentation ref_seg = load_segmentation(args.seg, ref);
  const PartSegmentation pred_seg = load_segmentation(args.seg, pred);
  const SurfaceRegressor ref_reg = make_regressor(ref, ref_seg, {args.sampling.n_samples,
                                                                   args.sampling.seed,
                                                                   args.sampling.mirror,
                                                                   {}});
  const SurfaceRegressor pred_reg =
      same_topology(pred, ref) && pred_seg.face_labels() == ref_seg.face_labels()
          ? ref_reg
          : make_regressor(pred, pred_seg,
                           {args.sampling.n_samples, args.sampling.seed, args.sampling.mirror, {}});

  const Analysed a = analyse_mesh(pred, pred_seg, pred_reg, ground, cfg, args.tau, args.cell);
  const Analysed b = analyse_mesh(ref, ref_seg, ref_reg, ground, cfg, args.tau, args.cell);
  EvalRecord rec;
  rec.name = name;
  rec.bose_pred = a.report.bose;
  rec.bose_ref = b.report.bose;
  rec.com_error_mm = 1000.0 * (a.report.com_part - b.report.com_part).norm();
  rec.cop_error_mm = 1000.0 * (a.report.cop - b.report.cop).norm();
  rec.pressure_iou = pressure_iou_sweep(a.grid, b.grid);

  const auto pj = read_joints(pred_path);
  const auto rj = read_joints(ref_path);
  if (pj && rj) {
    if (pred.num_vertices() == ref.num_vertices()) {
      const JointErrors e = joint_errors(*pj, *rj, pred.vertices(), ref.vertices());
      rec.pve_mm = e.pve;
      rec.mpjpe_mm = e.mpjpe;
      rec.pa_mpjpe_mm = e.pa_mpjpe;
    } else {
      rec.mpjpe_mm = mpjpe(*pj, *rj);
      rec.pa_mpjpe_mm = pa_mpjpe(*pj, *rj);
    }
  } else if (pred.num_vertices() == ref.num_vertices()) {
    const Vec3 shift = com_naive(ref.vertices()) - com_naive(pred.vertices());
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.num_vertices(); ++i) {
      sum += (pred.vertices()[i] + shift - ref.vertices()[i]).norm();
    }
    rec.pve_mm = 1000.0 * sum / static_cast<double>(pred.num_vertices());
  }
  return rec;
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? io::format_double(*v) : std::string();
}

}  // namespace

std::vector<EvalRecord> cmd_eval(const EvalArgs& args) {
  const auto pred = list_meshes(args.pred);
  const auto ref = list_meshes(args.ref);
  std::vector<std::string> unpaired;
  for (const auto& [stem, path] : pred) {
    if (ref.count(stem) == 0) unpaired.push_back((args.pred / path.filename()).string());
  }
  for (const auto& [stem, path] : ref) {
    if (pred.count(stem) == 0) unpaired.push_back((args.ref / path.filename()).string());
  }
  if (!unpaired.empty()) {
    std::string msg = "files without a partner:";
    for (const std::string& u : unpaired) msg += " " + u;
    throw Error(ErrorCode::kUnpairedFiles, msg);
  }
  if (pred.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no .obj/.ply meshes in " + args.pred.string() +
                                            " and " + args.ref.string());
  }
  if (!args.seg.empty()) require_file(args.seg, "segmentation file");
  const GroundFrame ground = load_ground(args.ground);
  const LossConfig cfg = io::resolve_profile(args.profile);
  prepare_out(args.out);

  std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> jobs;
  for (const auto& [stem, path] : pred) jobs.push_back({stem, {path, ref.at(stem)}});

  std::vector<EvalRecord> records(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        records[i] = evaluate_pair(jobs[i].first, jobs[i].second.first,
                                   jobs[i].second.second, args, ground, cfg);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int nthreads =
      std::min<int>(resolve_threads(args.threads), static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::ostringstream csv;
  csv << "name,bose_pred,bose_ref,com_error_mm,cop_error_mm,pressure_iou,mpjpe_mm,"
         "pa_mpjpe_mm,pve_mm\n";
  double com = 0.0, cop = 0.0, iou = 0.0;
  int bose_pred = 0, bose_ref = 0;
  double mp = 0.0, pa = 0.0, pv = 0.0;
  int n_mp = 0, n_pv = 0;
  for (const EvalRecord& r : records) {
    csv << r.name << ',' << r.bose_pred << ',' << r.bose_ref << ','
        << io::format_double(r.com_error_mm) << ',' << io::format_double(r.cop_error_mm)
        << ',' << io::format_double(r.pressure_iou) << ',' << opt_cell(r.mpjpe_mm) << ','
        << opt_cell(r.pa_mpjpe_mm) << ',' << opt_cell(r.pve_mm) << '\n';
    com += r.com_error_mm;
    cop += r.cop_error_mm;
    iou += r.pressure_iou;
    bose_pred += r.bose_pred;
    bose_ref += r.bose_ref;
    if (r.mpjpe_mm) {
      mp += *r.mpjpe_mm;
      pa += *r.pa_mpjpe_mm;
      ++n_mp;
    }
    if (r.pve_mm) {
      pv += *r.pve_mm;
      ++n_pv;
    }
  }
  const double n = static_cast<double>(records.size());
  Json summary;
  summary["num_frames"] = records.size();
  summary["bose_percent"] = 100.0 * bose_pred / n;
  summary["bose_percent_ref"] = 100.0 * bose_ref / n;
  summary["mean_com_error_mm"] = com / n;
  summary["mean_cop_error_mm"] = cop / n;
  summary["mean_pressure_iou"] = iou / n;
  if (n_mp > 0) {
    summary["mean_mpjpe_mm"] = mp / n_mp;
    summary["mean_pa_mpjpe_mm"] = pa / n_mp;
  }
  if (n_pv > 0) summary["mean_pve_mm"] = pv / n_pv;
  io::write_text(args.out / "eval.csv", csv.str());
  io::write_json(args.out / "summary.json", summary);
  return records;
}

void cmd_sample(const SampleArgs& args) {
  if (args.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  require_file(args.mesh, "mesh file");
  const Mesh mesh = read_mesh(args.mesh);
  SamplingOptions opts;
  opts.mirror_axes = parse_mirror_axes(args.sampling.mirror);
  const SurfaceRegressor reg =
      sample_surface(mesh, args.sampling.n_samples, args.sampling.seed, opts);
  if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
  write_regressor(args.out, reg,
                  regressor_cache_key(mesh, args.sampling.n_samples, args.sampling.seed, opts));
}

namespace {

void add_sampling(CLI::App* app, SamplingArgs& s) {
  app->add_option("--n-samples", s.n_samples, "Number of surface samples")->capture_default_str();
  app->add_option("--seed", s.seed, "Sampling seed")->capture_default_str();
  app->add_option("--mirror", s.mirror, "Mirror planes for symmetric sampling, e.g. x,y");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability analysis, IP losses and fitting for articulated meshes", "stabilis"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: STABILIS_THREADS or 1)");

  AnalyzeArgs analyze_args;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Stability report for one mesh");
  analyze_cmd->add_option("--mesh", analyze_args.mesh, "Mesh (.obj or .ply)")->required();
  analyze_cmd->add_option("--seg", analyze_args.seg, "Part segmentation JSON");
  analyze_cmd->add_option("--ground", analyze_args.ground, "Ground frame JSON");
  analyze_cmd->add_option("--camera", analyze_args.camera,
                          "Camera JSON; the mesh is then read in camera coordinates");
  analyze_cmd->add_option("--profile", analyze_args.profile,
                          "regression, optimization or a profile JSON")
      ->capture_default_str();
  analyze_cmd->add_option("--tau", analyze_args.tau, "Contact threshold (m)")->capture_default_str();
  analyze_cmd->add_option("--cell", analyze_args.cell, "Heatmap cell size (m)")->capture_default_str();
  analyze_cmd->add_option("--cache", analyze_args.sampling.cache, "Sample matrix cache file");
  analyze_cmd->add_option("--out", analyze_args.out, "Output directory")->required();
  add_sampling(analyze_cmd, analyze_args.sampling);
  analyze_cmd->add_option("--threads", threads, "Worker threads");

  FitArgs fit_args;
  std::uint64_t fit_seed = 0;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit the toy body to 2D keypoints");
  fit_cmd->add_option("problem,--problem", fit_args.problem, "Fit problem JSON")->required();
  CLI::Option* seed_opt = fit_cmd->add_option("--seed", fit_seed, "Override the sampling seed");
  fit_cmd->add_option("--profile", fit_args.profile, "Override the loss profile");
  fit_cmd->add_option("--out", fit_args.out, "Output directory")->required();
  fit_cmd->add_option("--threads", threads, "Worker threads");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Compare predicted and reference meshes");
  eval_cmd->add_option("--pred", eval_args.pred, "Directory of predicted meshes")->required();
  eval_cmd->add_option("--ref", eval_args.ref, "Directory of reference meshes")->required();
  eval_cmd->add_option("--seg", eval_args.seg, "Part segmentation JSON shared by all frames");
  eval_cmd->add_option("--ground", eval_args.ground, "Ground frame JSON");
  eval_cmd->add_option("--profile", eval_args.profile, "Loss profile for pressure")
      ->capture_default_str();
  eval_cmd->add_option("--tau", eval_args.tau, "Contact threshold (m)")->capture_default_str();
  eval_cmd->add_option("--cell", eval_args.cell, "Heatmap cell size (m)")->capture_default_str();
  eval_cmd->add_option("--out", eval_args.out, "Output directory")->required();
  add_sampling(eval_cmd, eval_args.sampling);
  eval_cmd->add_option("--threads", threads, "Worker threads");

  SampleArgs sample_args;
  CLI::App* sample_cmd = app.add_subcommand("sample", "Write a surface sample matrix");
  sample_cmd->add_option("--mesh", sample_args.mesh, "Mesh (.obj or .ply)")->required();
  sample_cmd->add_option("--out", sample_args.out, "Output file")->required();
  add_sampling(sample_cmd, sample_args.sampling);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "stabilis: " << e.what() << "\n";
    return 2;
  }

  try {
    if (threads < 0) throw Error(ErrorCode::kInvalidArgument, "--threads must be >= 0");
    if (analyze_cmd->parsed()) {
      cmd_analyze(analyze_args);
      out << "wrote " << (analyze_args.out / "report.json").string() << "\n";
    } else if (fit_cmd->parsed()) {
      if (seed_opt->count() > 0) fit_args.seed = fit_seed;
      cmd_fit(fit_args);
      out << "wrote " << (fit_args.out / "fit_result.json").string() << "\n";
    } else if (eval_cmd->parsed()) {
      eval_args.threads = threads;
      const auto records = cmd_eval(eval_args);
      out << "evaluated " << records.size() << " frames\n";
    } else if (sample_cmd->parsed()) {
      cmd_sample(sample_args);
      out << "wrote " << sample_args.out.string() << "\n";
    }
  } catch (const Error& e) {
    err << "stabilis: " << e.what() << "\n";
    return is_numerical(e.code()) ? 3 : 2;
  } catch (const nlohmann::json::exception& e) {
    err << "stabilis: invalid JSON: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "stabilis: internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace stabilis::cli
