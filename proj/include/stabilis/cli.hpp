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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stabilis/metrics.hpp"

namespace stabilis::cli {

struct SamplingArgs {
  std::size_t n_samples = 2000;
  std::uint64_t seed = 0;
  /// Mirror planes for symmetric sampling, e.g. "x,y". Empty = plain.
  std::string mirror;
  /// Optional sample-matrix cache file.
  std::filesystem::path cache;
};

struct AnalyzeArgs {
  std::filesystem::path mesh;
  std::filesystem::path seg;     // empty: labels stored in the mesh
  std::filesystem::path ground;  // empty: z = 0, up = +z
  std::filesystem::path camera;  // non-empty: mesh is in this camera's frame
  std::string profile = "regression";
  double tau = 0.10;
  double cell = 0.01;
  SamplingArgs sampling;
  std::filesystem::path out;
};

struct FitArgs {
  std::filesystem::path problem;
  std::optional<std::uint64_t> seed;
  std::string profile;  // overrides the problem's loss settings when set
  std::filesystem::path out;
};

struct EvalArgs {
  std::filesystem::path pred;
  std::filesystem::path ref;
  std::filesystem::path seg;
  std::filesystem::path ground;
  std::string profile = "regression";
  double tau = 0.10;
  double cell = 0.01;
  SamplingArgs sampling;
  int threads = 0;  // 0: STABILIS_THREADS or 1
  std::filesystem::path out;
};

struct SampleArgs {
  std::filesystem::path mesh;
  SamplingArgs sampling;
  std::filesystem::path out;
};

/// Writes report.json, pressure.csv, pressure.pgm and bos.json.
void cmd_analyze(const AnalyzeArgs& args);
/// Writes fit_result.json, final_mesh.obj, energy_trace.csv and
/// report_before.json / report_after.json.
void cmd_fit(const FitArgs& args);
/// Writes eval.csv and summary.json; returns the per-frame records.
std::vector<EvalRecord> cmd_eval(const EvalArgs& args);
/// Writes the sample matrix file.
void cmd_sample(const SampleArgs& args);

std::vector<int> parse_mirror_axes(const std::string& spec);
int resolve_threads(int requested);

/// Full command line (args excludes the program name). Exit codes: 0 ok,
/// 2 invalid input, 3 numerical failure, 1 unexpected internal error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stabilis::cli
