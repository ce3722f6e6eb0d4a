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

// Acceptance suite: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "stabilis/analysis.hpp"
#include "stabilis/cli.hpp"
#include "stabilis/fitting.hpp"
#include "stabilis/io.hpp"
#include "stabilis/losses.hpp"
#include "stabilis/mesh_io.hpp"
#include "stabilis/metrics.hpp"
#include "stabilis/scenes.hpp"
#include "stabilis/toy_body.hpp"

namespace fs = std::filesystem;
using namespace stabilis;
namespace oracle = stabilis::testing;

namespace {

const fs::path kFixtures = fs::path(STABILIS_SOURCE_DIR) / "data/fixtures";

struct Criterion {
  std::string detail;
  bool ok = true;

  void check(bool cond, const std::string& what) {
    if (!cond) ok = false;
    detail += (detail.empty() ? "" : "; ") + what + (cond ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Criterion volumetric_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  const double cube = signed_volume(oracle::unit_cube());
  c.check(std::abs(cube - 1.0) <= 1e-12, "cube " + fmt("%.17g", cube));
  const double sphere = signed_volume(oracle::icosphere(4));
  const double rel = std::abs(sphere / (4.0 / 3.0 * std::numbers::pi) - 1.0);
  c.check(rel < 5e-3, "icosphere rel err " + fmt("%.3e", rel));
  const ToyBody body = ToyBody::build();
  const PartVolumes pv = part_volumes(body.template_mesh(), body.segmentation());
  bool positive = pv.per_part.size() == 10;
  double sum = 0.0;
  for (double v : pv.per_part) {
    positive = positive && v > 0.0;
    sum += v;
  }
  c.check(positive, "10 positive part volumes");
  const auto mc = oracle::monte_carlo_volume(body.template_mesh(), 1'000'000, 2024);
  const double mc_rel = std::abs(sum / mc.volume - 1.0);
  c.check(mc_rel < 0.01, "toy sum vs 1e6-sample Monte Carlo rel err " + fmt("%.3e", mc_rel));
  const double t = seconds_since(t0);
  c.check(t < 30.0, "runtime " + fmt("%.2f", t) + " s");
  return c;
}

double fd_mesh(const Mesh& mesh, const std::function<LossValueWithGrad(const Mesh&)>& loss) {
  const LossValueWithGrad l = loss(mesh);
  auto f = [&](const Eigen::VectorXd& x) {
    return loss(mesh.with_vertices(oracle::unflatten(x))).value;
  };
  return oracle::max_relative_error(
      oracle::flatten(l.grad),
      oracle::central_difference(f, oracle::flatten(mesh.vertices())));
}

Criterion gradient_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  double worst_vol = 0, worst_stab = 0, worst_ground = 0, worst_comb = 0, worst_pose = 0,
         worst_fit = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Mesh base = oracle::jittered_sphere(seed, 3, 0.08);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    Points3 v = base.vertices();
    const Vec3 shift(u(rng), u(rng), -0.3 + u(rng));
    for (Vec3& p : v) p += shift;
    const Mesh mesh = base.with_vertices(v);
    const PartSegmentation seg = PartSegmentation::from_mesh(mesh);
    const SurfaceRegressor reg = sample_surface(mesh, 300, seed);
    const GroundFrame frame(Vec3(0, 0, 0.01 * u(rng)), Vec3(u(rng), u(rng), 1.0));
    LossConfig cfg = LossConfig::regression();
    cfg.stability_weight = 0.7;
    cfg.ground_weight = 1.3;

    const PartVolumesWithGrad pg = part_volumes_with_gradient(mesh, seg);
    for (int p = 0; p < seg.n_parts(); ++p) {
      auto f = [&](const Eigen::VectorXd& x) {
        return part_volumes(mesh.with_vertices(oracle::unflatten(x)), seg).per_part[p];
      };
      worst_vol = std::max(worst_vol, oracle::max_relative_error(
                                          oracle::flatten(pg.gradients[p]),
                                          oracle::central_difference(f, oracle::flatten(v))));
    }
    worst_stab = std::max(worst_stab, fd_mesh(mesh, [&](const Mesh& m) {
                            return stability_loss(m, seg, reg, frame, cfg);
                          }));
    worst_ground = std::max(worst_ground, fd_mesh(mesh, [&](const Mesh& m) {
                              return ground_loss(m, reg, frame, cfg);
                            }));
    worst_comb = std::max(worst_comb, fd_mesh(mesh, [&](const Mesh& m) {
                            return combined_energy(m, seg, reg, frame, cfg);
                          }));
  }

  const ToyBody body = ToyBody::build({1});
  const SurfaceRegressor reg = body.sample(2000, 7);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const BodyPose pose = scenes::random_pose(body, seed, 0.5);
    const PosedBody pb = body.pose(pose, true);
    const Eigen::VectorXd x0 = pose.to_vector();
    for (Eigen::Index k = 0; k < x0.size(); ++k) {
      Eigen::VectorXd xp = x0, xm = x0;
      xp[k] += 1e-6;
      xm[k] -= 1e-6;
      const Eigen::VectorXd fd =
          (oracle::flatten(pose_mesh(body, BodyPose::from_vector(xp)).vertices()) -
           oracle::flatten(pose_mesh(body, BodyPose::from_vector(xm)).vertices())) /
          2e-6;
      worst_pose = std::max(worst_pose, oracle::max_relative_error(pb.vertex_jacobian.col(k), fd));
    }

    FitProblem p;
    p.body = {1};
    p.camera = scenes::front_camera();
    p.targets = scenes::project_targets(body, scenes::random_pose(body, seed + 50, 0.3), p.camera);
    p.loss.stability_weight = 3.0;
    p.loss.ground_weight = 2.0;
    BodyPose init = scenes::random_pose(body, seed, 0.3);
    init.root_translation.z() += 0.01 * static_cast<double>(seed) - 0.027;
    p.init = init;
    const FitObjective obj(body, p, reg);
    const FitEnergy e = obj.evaluate(init.to_vector(), true, true);
    auto f = [&](const Eigen::VectorXd& x) { return obj.evaluate(x, true, false).total; };
    worst_fit = std::max(worst_fit, oracle::max_relative_error(
                                        e.grad, oracle::central_difference(f, init.to_vector())));
  }
  c.check(worst_vol < 1e-4, "part_volumes " + fmt("%.2e", worst_vol));
  c.check(worst_stab < 1e-4, "stability_loss " + fmt("%.2e", worst_stab));
  c.check(worst_ground < 1e-4, "ground_loss " + fmt("%.2e", worst_ground));
  c.check(worst_comb < 1e-4, "combined_energy " + fmt("%.2e", worst_comb));
  c.check(worst_pose < 1e-4, "pose_mesh " + fmt("%.2e", worst_pose));
  c.check(worst_fit < 1e-4, "fit energy " + fmt("%.2e", worst_fit));
  const double t = seconds_since(t0);
  c.check(t < 120.0, "runtime " + fmt("%.2f", t) + " s");
  return c;
}

Criterion bose_cross_validation() {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  std::mt19937_64 rng(10'000);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> count(1, 60);
  std::uniform_int_distribution<int> kind(0, 3);
  int disagree = 0;
  const int n = 10'000;
  for (int trial = 0; trial < n; ++trial) {
    Points2 pts(count(rng));
    const int k = kind(rng);
    for (Vec2& p : pts) {
      p = 0.2 * Vec2(u(rng), u(rng));
      if (k == 1) p.y() = 0.5 * p.x() + 0.01;  // collinear set
    }
    if (k == 2) pts.resize(std::min<std::size_t>(pts.size(), 3));
    const Vec2 q = 0.25 * Vec2(u(rng), u(rng));
    if (bose_lp(q, pts) != oracle::oracle_point_in_hull(q, pts, 1e-6)) ++disagree;
  }
  c.check(disagree == 0, std::to_string(n - disagree) + "/" + std::to_string(n) + " agree");
  const double t = seconds_since(t0);
  c.check(t < 10.0, "runtime " + fmt("%.2f", t) + " s");
  return c;
}

Criterion loss_shapes() {
  Criterion c;
  const PressureParams reg{100.0, 10.0};
  c.check(pressure_value(0.0, reg) == 1.0 && pressure_value(-0.0, reg) == 1.0 &&
              1.0 - reg.alpha * 0.0 == std::exp(-reg.gamma * 0.0),
          "rho(0) = 1 from both branches");
  c.check(std::abs(pressure_value(-0.01, reg) - 2.0) <= 1e-12,
          "rho(-0.01) = " + fmt("%.17g", pressure_value(-0.01, reg)));
  c.check(std::abs(pressure_value(0.1, reg) - std::exp(-1.0)) <= 1e-12,
          "rho(0.1) = " + fmt("%.17g", pressure_value(0.1, reg)));
  const LossConfig cfg;
  const double t1 = std::tanh(1.0) * std::tanh(1.0);
  c.check(std::abs(pull_loss(0.15, cfg) - t1) <= 1e-12,
          "L_pull(0.15) = " + fmt("%.17g", pull_loss(0.15, cfg)));
  double peak = 0.0;
  for (int i = 0; i <= 200000; ++i) peak = std::max(peak, std::abs(pull_loss_slope(0.2 * i / 200000, cfg)));
  const double ratio = std::abs(pull_loss_slope(0.20, cfg)) / peak;
  c.check(ratio < 0.03, "|dL_pull/dh|(0.20) / max on [0,0.2] = " + fmt("%.4f", ratio));
  return c;
}

bool monotone(const std::vector<TraceEntry>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i].stage == trace[i - 1].stage &&
        trace[i].energy > trace[i - 1].energy + 1e-12 * std::abs(trace[i - 1].energy)) {
      return false;
    }
  }
  return true;
}

Criterion fitting_efficacy() {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  const ToyBody body = ToyBody::build();
  const SurfaceRegressor reg = body.sample(scenes::kSamples, scenes::kSeed);

  const FitResult hover = fit(body, scenes::hovering_problem(body), reg);
  const double h = hover.after.subset_mean_abs_height.value_or(1e9);
  c.check(h < 0.01 && hover.iterations <= 500,
          "hovering mean |h| " + fmt("%.3e", h) + " m in " + std::to_string(hover.iterations) + " it");

  const FitResult lean = fit(body, scenes::leaning_problem(body, reg), reg);
  const double frac = lean.after.stability_loss / lean.before.stability_loss;
  c.check(frac < 0.2, "leaning L_stab " + fmt("%.4f", lean.before.stability_loss) + " -> " +
                          fmt("%.4f", lean.after.stability_loss));

  const FitResult rec = fit(body, scenes::pose_recovery_problem(body), reg);
  const double e = rec.trace.back().keypoint;
  c.check(e < 1.0, "pose recovery E_J2D " + fmt("%.4f", e) + " px^2");

  c.check(monotone(hover.trace) && monotone(lean.trace) && monotone(rec.trace),
          "traces monotone");
  const double t = seconds_since(t0);
  c.check(t < 120.0, "runtime " + fmt("%.2f", t) + " s");
  return c;
}

Mesh labelled(const Mesh& mesh, const PartSegmentation& seg) {
  return Mesh(mesh.vertices(), mesh.faces(), seg.face_labels());
}

Criterion stability_sanity() {
  Criterion c;
  const GroundFrame ground = io::read_ground(kFixtures / "ground.json");
  SamplingOptions mirror;
  mirror.mirror_axes = ToyBody::mirror_axes();
  const LossConfig cfg = LossConfig::regression();
  for (const char* name : {"standing"}) {
    const Mesh mesh = read_mesh(kFixtures / name / "mesh.obj");
    const PartSegmentation seg = io::read_segmentation(kFixtures / "toy_seg.json", mesh);
    const SurfaceRegressor reg = sample_surface(labelled(mesh, seg), 2000, 7, mirror);
    const StabilityReport r = analyze(mesh, seg, reg, ground, cfg);
    const double gap = (r.com_plane - r.cop_plane).norm();
    c.check(gap <= 1e-9 && r.is_stable,
            std::string(name) + " |g(m)-g(s)| " + fmt("%.2e", gap) +
                (r.is_stable ? " stable" : " unstable"));
  }
  const Mesh tilted = read_mesh(kFixtures / "tilted/mesh.obj");
  const PartSegmentation seg = io::read_segmentation(kFixtures / "toy_seg.json", tilted);
  const SurfaceRegressor reg = sample_surface(labelled(tilted, seg), 2000, 7);
  const int bose = bose_metric(tilted, seg, reg, ground);
  c.check(bose == 0, "tilted 45 deg BoSE = " + std::to_string(bose));
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool same_tree(const fs::path& a, const fs::path& b, std::size_t& files) {
  bool same = true;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path other = b / fs::relative(e.path(), a);
    same = same && fs::exists(other) && slurp(e.path()) == slurp(other);
    ++files;
  }
  return same;
}

Criterion determinism() {
  Criterion c;
  const fs::path root = fs::temp_directory_path() / "stabilis_acceptance_determinism";
  fs::remove_all(root);
  for (const char* run : {"a", "b"}) {
    cli::AnalyzeArgs an;
    an.mesh = kFixtures / "leaning/mesh.obj";
    an.seg = kFixtures / "toy_seg.json";
    an.ground = kFixtures / "ground.json";
    an.sampling.seed = 7;
    an.out = root / run / "analyze";
    cli::cmd_analyze(an);

    cli::FitArgs fa;
    fa.problem = kFixtures / "fit/hovering.json";
    fa.seed = 7;
    fa.out = root / run / "fit";
    cli::cmd_fit(fa);

    cli::EvalArgs ev;
    ev.pred = kFixtures / "eval/pred";
    ev.ref = kFixtures / "eval/ref";
    ev.seg = kFixtures / "toy_seg.json";
    ev.sampling.seed = 7;
    ev.threads = std::string(run) == "a" ? 1 : 3;
    ev.out = root / run / "eval";
    cli::cmd_eval(ev);
  }
  for (const char* cmd : {"analyze", "fit", "eval"}) {
    std::size_t files = 0;
    const bool same = same_tree(root / "a" / cmd, root / "b" / cmd, files);
    c.check(same && files > 0, std::string(cmd) + " " + std::to_string(files) + " files identical");
  }
  fs::remove_all(root);
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Criterion (*run)();
  };
  const Entry entries[] = {
      {"1 volumetric correctness", volumetric_correctness},
      {"2 gradient suite", gradient_suite},
      {"3 BoSE cross-validation", bose_cross_validation},
      {"4 loss shapes", loss_shapes},
      {"5 fitting efficacy", fitting_efficacy},
      {"6 stability-element sanity", stability_sanity},
      {"7 determinism", determinism},
  };
  int failed = 0;
  for (const Entry& e : entries) {
    Criterion c;
    try {
      c = e.run();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.detail = std::string("exception: ") + ex.what();
    }
    std::printf("[%s] criterion %s: %s\n", c.ok ? "PASS" : "FAIL", e.name, c.detail.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failed;
  }
  std::printf("%d/7 criteria passed\n", 7 - failed);
  return failed;
}
