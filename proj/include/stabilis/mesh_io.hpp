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
#include <iosfwd>

#include "stabilis/geometry.hpp"

namespace stabilis {

/// ASCII OBJ: `v x y z` and `f a b c ...` records with 1-based (or negative,
/// relative) indices; `a/b/c` index groups keep only the position index.
/// Polygons are fan-triangulated.
Mesh read_obj(std::istream& in);
Mesh read_obj(const std::filesystem::path& path);
void write_obj(std::ostream& out, const Mesh& mesh);
void write_obj(const std::filesystem::path& path, const Mesh& mesh);

/// Binary little-endian PLY. Reads float/double x,y,z and a face list named
/// vertex_indices or vertex_index; a scalar face property `part` (if
/// present) becomes face_parts. Unknown properties and elements are skipped.
Mesh read_ply(std::istream& in);
Mesh read_ply(const std::filesystem::path& path);
void write_ply(std::ostream& out, const Mesh& mesh);
void write_ply(const std::filesystem::path& path, const Mesh& mesh);

/// Dispatches on extension (.obj / .ply).
Mesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const Mesh& mesh);

}  // namespace stabilis
