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

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stabilis/analysis.hpp"
#include "stabilis/cli.hpp"
#include "stabilis/error.hpp"
#include "stabilis/fitting.hpp"
#include "stabilis/io.hpp"
#include "stabilis/losses.hpp"
#include "stabilis/mesh_io.hpp"
#include "stabilis/metrics.hpp"
#include "stabilis/toy_body.hpp"
#include "stabilis/volumetrics.hpp"

namespace py = pybind11;
using namespace stabilis;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IndexArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

Points3 to_points(const Array& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw py::value_error("expected an (n, 3) array");
  Points3 out(static_cast<std::size_t>(a.shape(0)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out[i] = Vec3(r(i, 0), r(i, 1), r(i, 2));
  return out;
}

Array from_points(const Points3& pts) {
  Array a({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int c = 0; c < 3; ++c) w(i, c) = pts[i][c];
  }
  return a;
}

std::vector<Face> to_faces(const IndexArray& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw py::value_error("expected an (m, 3) index array");
  std::vector<Face> out(static_cast<std::size_t>(a.shape(0)));
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out[i] = {r(i, 0), r(i, 1), r(i, 2)};
  return out;
}

IndexArray from_faces(const std::vector<Face>& faces) {
  IndexArray a({static_cast<py::ssize_t>(faces.size()), py::ssize_t{3}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < faces.size(); ++i) {
    for (int c = 0; c < 3; ++c) w(i, c) = faces[i][c];
  }
  return a;
}

// JSON crosses the boundary as text; the Python side decodes it.
std::string json_text(const io::Json& j) { return io::dump_json(j); }

py::tuple loss_tuple(const LossValueWithGrad& l) {
  return py::make_tuple(l.value, from_points(l.grad));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Intuitive-physics stability analysis for body meshes.";

  static py::handle error_type =
      py::exception<Error>(m, "StabilisError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type)(e.what());
      err.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  py::class_<Mesh>(m, "Mesh")
      .def(py::init([](const Array& v, const IndexArray& f, std::optional<std::vector<int>> parts) {
             return Mesh(to_points(v), to_faces(f), std::move(parts));
           }),
           py::arg("vertices"), py::arg("faces"), py::arg("face_parts") = py::none())
      .def_property_readonly("vertices", [](const Mesh& mesh) { return from_points(mesh.vertices()); })
      .def_property_readonly("faces", [](const Mesh& mesh) { return from_faces(mesh.faces()); })
      .def_property_readonly("face_parts", [](const Mesh& mesh) { return mesh.face_parts(); })
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_faces", &Mesh::num_faces)
      .def("with_vertices",
           [](const Mesh& mesh, const Array& v) { return mesh.with_vertices(to_points(v)); });

  m.def("read_mesh", [](const std::filesystem::path& p) { return read_mesh(p); });
  m.def("write_mesh", [](const std::filesystem::path& p, const Mesh& mesh) { write_mesh(p, mesh); });

  py::class_<PartSegmentation>(m, "PartSegmentation")
      .def(py::init<const Mesh&, int, std::vector<int>>(), py::arg("mesh"), py::arg("n_parts"),
           py::arg("face_labels"))
      .def_static("from_mesh", &PartSegmentation::from_mesh)
      .def_static("read", &io::read_segmentation, py::arg("path"), py::arg("mesh"))
      .def_property_readonly("n_parts", &PartSegmentation::n_parts)
      .def_property_readonly("face_labels", &PartSegmentation::face_labels)
      .def("boundary_vertices", &PartSegmentation::boundary_vertices);

  py::class_<GroundFrame>(m, "GroundFrame")
      .def(py::init<>())
      .def(py::init<const Vec3&, const Vec3&>(), py::arg("point_on_plane"), py::arg("up_normal"))
      .def_static("read", &io::read_ground)
      .def_property_readonly("point_on_plane", &GroundFrame::point_on_plane)
      .def_property_readonly("up_normal", &GroundFrame::up_normal)
      .def("to_plane", &GroundFrame::to_plane)
      .def("height", [](const GroundFrame& f, const Vec3& u) { return height(f, u); });

  py::class_<LossConfig>(m, "LossConfig")
      .def(py::init<>())
      .def_static("regression", &LossConfig::regression)
      .def_static("optimization", &LossConfig::optimization)
      .def_static("resolve", &io::resolve_profile, py::arg("name_or_path"))
      .def_readwrite("pull_amplitude", &LossConfig::pull_amplitude)
      .def_readwrite("pull_scale", &LossConfig::pull_scale)
      .def_readwrite("push_amplitude", &LossConfig::push_amplitude)
      .def_readwrite("push_scale", &LossConfig::push_scale)
      .def_readwrite("stability_weight", &LossConfig::stability_weight)
      .def_readwrite("ground_weight", &LossConfig::ground_weight)
      .def_property(
          "alpha", [](const LossConfig& c) { return c.pressure.alpha; },
          [](LossConfig& c, double v) { c.pressure.alpha = v; })
      .def_property(
          "gamma", [](const LossConfig& c) { return c.pressure.gamma; },
          [](LossConfig& c, double v) { c.pressure.gamma = v; })
      .def("to_json", [](const LossConfig& c) { return json_text(io::to_json(c)); });

  py::class_<SurfaceRegressor>(m, "SurfaceRegressor")
      .def_property_readonly("num_samples", &SurfaceRegressor::num_samples)
      .def_property_readonly("num_vertices", &SurfaceRegressor::num_vertices)
      .def_property_readonly("part_labels", &SurfaceRegressor::part_labels)
      .def_property_readonly("source_faces", &SurfaceRegressor::source_faces)
      .def("apply", [](const SurfaceRegressor& r, const Array& v) {
        return from_points(r.apply(to_points(v)));
      })
      .def("matrix", &SurfaceRegressor::matrix);

  m.def(
      "sample_surface",
      [](const Mesh& mesh, std::size_t n, std::uint64_t seed, std::vector<int> mirror_axes) {
        SamplingOptions opts;
        opts.mirror_axes = std::move(mirror_axes);
        return sample_surface(mesh, n, seed, opts);
      },
      py::arg("mesh"), py::arg("n"), py::arg("seed"), py::arg("mirror_axes") = std::vector<int>{});

  m.def("signed_volume", &signed_volume);
  m.def("is_watertight", &is_watertight);
  m.def("part_volumes", [](const Mesh& mesh, const PartSegmentation& seg) {
    return part_volumes(mesh, seg).per_part;
  });

  m.def("pressure", [](double h, double alpha, double gamma) {
    return pressure_value(h, PressureParams{alpha, gamma});
  });
  m.def("pull_loss", &pull_loss);
  m.def("push_loss", &push_loss);
  m.def("stability_loss",
        [](const Mesh& mesh, const PartSegmentation& seg, const SurfaceRegressor& reg,
           const GroundFrame& frame, const LossConfig& cfg) {
          return loss_tuple(stability_loss(mesh, seg, reg, frame, cfg));
        });
  m.def("ground_loss", [](const Mesh& mesh, const SurfaceRegressor& reg, const GroundFrame& frame,
                          const LossConfig& cfg) {
    return loss_tuple(ground_loss(mesh, reg, frame, cfg));
  });
  m.def("combined_energy",
        [](const Mesh& mesh, const PartSegmentation& seg, const SurfaceRegressor& reg,
           const GroundFrame& frame, const LossConfig& cfg) {
          return loss_tuple(combined_energy(mesh, seg, reg, frame, cfg));
        });

  m.def(
      "analyze_json",
      [](const Mesh& mesh, const PartSegmentation& seg, const SurfaceRegressor& reg,
         const GroundFrame& frame, const LossConfig& cfg, double tau) {
        return json_text(io::to_json(analyze(mesh, seg, reg, frame, cfg, tau)));
      },
      py::arg("mesh"), py::arg("seg"), py::arg("reg"), py::arg("ground"), py::arg("cfg"),
      py::arg("tau") = 0.10);

  m.def(
      "bose_lp",
      [](const Vec2& target, const std::vector<Vec2>& contacts, double tol) {
        return bose_lp(target, contacts, {tol, 1000});
      },
      py::arg("target"), py::arg("contacts"), py::arg("tolerance") = 1e-6);

  py::class_<ToyBody>(m, "ToyBody")
      .def_static(
          "build", [](int resolution) { return ToyBody::build({resolution}); },
          py::arg("resolution") = 2)
      .def_property_readonly("template_mesh", &ToyBody::template_mesh)
      .def_property_readonly("segmentation", &ToyBody::segmentation)
      .def_property_readonly("num_params", &ToyBody::num_params)
      .def("sample", &ToyBody::sample, py::arg("n"), py::arg("seed"))
      .def("pose_mesh", [](const ToyBody& body, const Eigen::VectorXd& params) {
        return pose_mesh(body, BodyPose::from_vector(params));
      });

  m.def("fit_json", [](const std::filesystem::path& problem) {
    return json_text(io::fit_result_to_json(fit(io::read_fit_problem(problem))));
  });

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a command-line invocation; returns (exit_code, stdout, stderr).");
}
