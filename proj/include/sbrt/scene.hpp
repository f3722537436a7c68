// SPDX-License-Identifier: Apache-2.0
//
// sbrt - shooting-and-bouncing ray tracer with iterative cone refinement
// Copyright (C) 2026 The sbrt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "sbrt/geometry.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace sbrt
{
    constexpr double speed_of_light = 299792458.0;      // m/s
    constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
    constexpr double default_coplanarity_threshold = 1e-3;   // rad

    // Load or validation failure. The message names the offending element.
    class SceneError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    struct Material
    {
        std::string name;
        double relative_permittivity = 1.0; // >= 1
        double conductivity = 0.0;          // S/m, >= 0, +inf for a perfect conductor
    };

    struct Face
    {
        int id = 0;
        std::array<int, 3> vertex_indices{};
        int material_id = 0;
        Vec3 normal; // from winding order (v1 - v0) x (v2 - v0)
        double area = 0.0;
    };

    struct Wedge
    {
        int id = 0;
        std::array<int, 2> edge{};  // vertex indices, edge[0] < edge[1]
        std::array<int, 2> faces{}; // adjacent face ids, faces[0] < faces[1]
        Vec3 p0, p1;                // edge endpoints
        double exterior_angle = 0.0; // free-space opening angle (0, 2 pi)

        Vec3 direction() const { return normalized(p1 - p0); }
        double length() const { return distance(p0, p1); }
    };

    // Unvalidated face description used to build scenes.
    struct FaceSpec
    {
        std::array<int, 3> v{};
        int material = 0;
    };

    struct WedgeSpec
    {
        std::array<int, 2> edge{};
        std::array<int, 2> faces{};
    };

    struct Scene
    {
        std::vector<Vec3> vertices;
        std::vector<Face> faces;
        std::vector<Wedge> wedges;
        std::vector<Material> materials;
        Vec3 tx, rx;
        double frequency = 0.0; // Hz

        std::array<Vec3, 3> triangle(int face_id) const
        {
            const auto &f = faces[static_cast<std::size_t>(face_id)];
            return {vertices[f.vertex_indices[0]], vertices[f.vertex_indices[1]], vertices[f.vertex_indices[2]]};
        }
        double wavelength() const { return speed_of_light / frequency; }
        const Material &material_of(int face_id) const
        {
            return materials[static_cast<std::size_t>(faces[static_cast<std::size_t>(face_id)].material_id)];
        }
    };

    struct WedgeExtraction
    {
        std::vector<Wedge> wedges;
        std::vector<std::string> warnings; // non-manifold edges
        std::vector<std::string> winding_conflicts;
    };

    // One wedge per manifold edge whose free-space angle differs from pi by more
    // than the threshold. Wedges are ordered by their vertex pair, so the result
    // does not depend on the order of `faces`.
    WedgeExtraction extract_wedges(const std::vector<Vec3> &vertices, const std::vector<Face> &faces,
                                   double coplanarity_threshold = default_coplanarity_threshold);

    // Free-space angle at the shared edge of two faces, measured on the side the
    // normals point to.
    double exterior_angle(const std::vector<Vec3> &vertices, const Face &a, const Face &b, int e0, int e1);

    // Validates all references and geometry, derives normals/areas, and takes the
    // wedges from `wedges` when given or extracts them otherwise. Throws SceneError.
    Scene build_scene(std::vector<Vec3> vertices, const std::vector<FaceSpec> &faces,
                      std::vector<Material> materials, const Vec3 &tx, const Vec3 &rx, double frequency,
                      const std::optional<std::vector<WedgeSpec>> &wedges = std::nullopt);

    Scene scene_from_json(const nlohmann::json &j);
    nlohmann::json scene_to_json(const Scene &scene);

    Scene load_scene(const std::string &path);
    void save_scene(const Scene &scene, const std::string &path);

    // FNV-1a over the canonical JSON form; identifies a scene across files.
    std::uint64_t scene_hash(const Scene &scene);

    // Same geometry and materials, different Tx/Rx.
    Scene with_endpoints(const Scene &scene, const Vec3 &tx, const Vec3 &rx);

    // Applies a rigid motion to all geometry and both endpoints.
    Scene transformed(const Scene &scene, const RigidTransform &tf);

    // ---------- Synthetic scenes ----------

    // Box [0,L]x[0,W]x[0,H] with inward-facing normals. Each wall is split into
    // subdivisions x subdivisions quads (two triangles each); 12 triangles for 1.
    Scene make_shoebox(const Vec3 &dimensions, const Material &material, const Vec3 &tx, const Vec3 &rx,
                       double frequency, int subdivisions = 1);

    // Two rectangular walls meeting at a vertical edge along the z axis from
    // (0,0,0) to (0,0,height): wall A in the plane y = 0 for x in [0, length_a],
    // wall B in the plane x = 0 for y in [0, length_b]. The solid quadrant is
    // x > 0, y > 0, so the only wedge has a 3 pi / 2 opening.
    Scene make_corner(double length_a, double length_b, double height, const Material &material, const Vec3 &tx,
                      const Vec3 &rx, double frequency);

    struct Block
    {
        double x0, y0, x1, y1, height;
    };

    // Ground square [-half, half]^2 at z = 0 plus closed-top rectangular blocks
    // standing on it (walls and roof, outward normals).
    Scene make_block_field(double ground_half_size, const std::vector<Block> &blocks, const Material &ground,
                           const Material &building, const Vec3 &tx, const Vec3 &rx, double frequency);

    // Materials used by the generators.
    Material concrete();
    Material perfect_conductor();
}
