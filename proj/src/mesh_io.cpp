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

#include "stabilis/mesh_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "stabilis/error.hpp"

namespace stabilis {
namespace {

static_assert(std::endian::native == std::endian::little,
              "PLY reader assumes a little-endian host");

std::ifstream open_in(const std::filesystem::path& path,
                      std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path,
                       std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

int parse_obj_index(const std::string& token, std::size_t num_vertices,
                    std::size_t line_no) {
  const std::string head = token.substr(0, token.find('/'));
  long long idx = 0;
  try {
    std::size_t used = 0;
    idx = std::stoll(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParseError,
                "bad face index '" + token + "' on line " +
                    std::to_string(line_no));
  }
  if (idx < 0) idx = static_cast<long long>(num_vertices) + idx + 1;
  if (idx < 1 || idx > static_cast<long long>(num_vertices)) {
    throw Error(ErrorCode::kParseError,
                "face index out of range on line " + std::to_string(line_no));
  }
  return static_cast<int>(idx - 1);
}

// --- PLY ---------------------------------------------------------------

enum class PlyType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

PlyType ply_type(const std::string& name) {
  static const std::map<std::string, PlyType> kTypes = {
      {"char", PlyType::kInt8},      {"int8", PlyType::kInt8},
      {"uchar", PlyType::kUInt8},    {"uint8", PlyType::kUInt8},
      {"short", PlyType::kInt16},    {"int16", PlyType::kInt16},
      {"ushort", PlyType::kUInt16},  {"uint16", PlyType::kUInt16},
      {"int", PlyType::kInt32},      {"int32", PlyType::kInt32},
      {"uint", PlyType::kUInt32},    {"uint32", PlyType::kUInt32},
      {"float", PlyType::kFloat32},  {"float32", PlyType::kFloat32},
      {"double", PlyType::kFloat64}, {"float64", PlyType::kFloat64},
  };
  auto it = kTypes.find(name);
  if (it == kTypes.end()) {
    throw Error(ErrorCode::kParseError, "unknown PLY type '" + name + "'");
  }
  return it->second;
}

template <typename T>
T read_raw(std::istream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(ErrorCode::kParseError, "truncated PLY body");
  return value;
}

double read_scalar(std::istream& in, PlyType type) {
  switch (type) {
    case PlyType::kInt8: return read_raw<std::int8_t>(in);
    case PlyType::kUInt8: return read_raw<std::uint8_t>(in);
    case PlyType::kInt16: return read_raw<std::int16_t>(in);
    case PlyType::kUInt16: return read_raw<std::uint16_t>(in);
    case PlyType::kInt32: return read_raw<std::int32_t>(in);
    case PlyType::kUInt32: return read_raw<std::uint32_t>(in);
    case PlyType::kFloat32: return read_raw<float>(in);
    case PlyType::kFloat64: return read_raw<double>(in);
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

}  // namespace

Mesh read_obj(std::istream& in) {
  Points3 vertices;
  std::vector<Face> faces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x() >> v.y() >> v.z())) {
        throw Error(ErrorCode::kParseError,
                    "bad vertex on line " + std::to_string(line_no));
      }
      vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string token;
      while (ls >> token) {
        poly.push_back(parse_obj_index(token, vertices.size(), line_no));
      }
      if (poly.size() < 3) {
        throw Error(ErrorCode::kParseError,
                    "face with fewer than 3 vertices on line " +
                        std::to_string(line_no));
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        faces.push_back({poly[0], poly[k], poly[k + 1]});
      }
    }
  }
  return Mesh(std::move(vertices), std::move(faces));
}

Mesh read_obj(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_obj(in);
}

void write_obj(std::ostream& out, const Mesh& mesh) {
  char buf[128];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(),
                  v.z());
    out << buf;
  }
  for (const auto& f : mesh.faces()) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

void write_obj(const std::filesystem::path& path, const Mesh& mesh) {
  auto out = open_out(path);
  write_obj(out, mesh);
}

Mesh read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    throw Error(ErrorCode::kParseError, "missing PLY magic");
  }
  std::vector<PlyElement> elements;
  bool saw_format = false;
  while (true) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::kParseError, "unterminated PLY header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "end_header") break;
    if (tag == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "binary_little_endian") {
        throw Error(ErrorCode::kParseError,
                    "only binary_little_endian PLY is supported, got " + fmt);
      }
      saw_format = true;
    } else if (tag == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(std::move(e));
    } else if (tag == "property") {
      if (elements.empty()) {
        throw Error(ErrorCode::kParseError, "property before element");
      }
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        p.is_list = true;
        p.count_type = ply_type(count_type);
        p.type = ply_type(item_type);
      } else {
        p.type = ply_type(type);
        ls >> p.name;
      }
      elements.back().properties.push_back(std::move(p));
    }
  }
  if (!saw_format) throw Error(ErrorCode::kParseError, "PLY format missing");

  Points3 vertices;
  std::vector<Face> faces;
  std::vector<int> parts;
  bool has_parts = false;
  for (const auto& e : elements) {
    for (std::size_t i = 0; i < e.count; ++i) {
      Vec3 v = Vec3::Zero();
      std::vector<int> poly;
      int part = 0;
      for (const auto& p : e.properties) {
        if (p.is_list) {
          const auto n = static_cast<std::size_t>(read_scalar(in, p.count_type));
          std::vector<int> items(n);
          for (auto& item : items) item = static_cast<int>(read_scalar(in, p.type));
          if (p.name == "vertex_indices" || p.name == "vertex_index") {
            poly = std::move(items);
          }
          continue;
        }
        const double value = read_scalar(in, p.type);
        if (e.name == "vertex") {
          if (p.name == "x") v.x() = value;
          if (p.name == "y") v.y() = value;
          if (p.name == "z") v.z() = value;
        } else if (e.name == "face" && p.name == "part") {
          part = static_cast<int>(value);
          has_parts = true;
        }
      }
      if (e.name == "vertex") {
        vertices.push_back(v);
      } else if (e.name == "face") {
        if (poly.size() < 3) {
          throw Error(ErrorCode::kParseError, "PLY face with < 3 vertices");
        }
        for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
          faces.push_back({poly[0], poly[k], poly[k + 1]});
          parts.push_back(part);
        }
      }
    }
  }
  std::optional<std::vector<int>> face_parts;
  if (has_parts) face_parts = std::move(parts);
  return Mesh(std::move(vertices), std::move(faces), std::move(face_parts));
}

Mesh read_ply(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  return read_ply(in);
}

void write_ply(std::ostream& out, const Mesh& mesh) {
  const bool parts = mesh.face_parts().has_value();
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex " << mesh.num_vertices() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "element face " << mesh.num_faces() << "\n"
      << "property list uchar int vertex_indices\n";
  if (parts) out << "property int part\n";
  out << "end_header\n";
  for (const auto& v : mesh.vertices()) {
    const double xyz[3] = {v.x(), v.y(), v.z()};
    out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
  }
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const std::uint8_t n = 3;
    out.write(reinterpret_cast<const char*>(&n), 1);
    const std::int32_t idx[3] = {mesh.faces()[f][0], mesh.faces()[f][1],
                                 mesh.faces()[f][2]};
    out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
    if (parts) {
      const std::int32_t part = (*mesh.face_parts())[f];
      out.write(reinterpret_cast<const char*>(&part), sizeof(part));
    }
  }
}

void write_ply(const std::filesystem::path& path, const Mesh& mesh) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  write_ply(out, mesh);
}

Mesh read_mesh(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".obj" || ext == ".OBJ") return read_obj(path);
  if (ext == ".ply" || ext == ".PLY") return read_ply(path);
  throw Error(ErrorCode::kInvalidArgument,
              "unsupported mesh extension: " + path.string());
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  const auto ext = path.extension().string();
  if (ext == ".ply" || ext == ".PLY") {
    write_ply(path, mesh);
  } else {
    write_obj(path, mesh);
  }
}

}  // namespace stabilis
