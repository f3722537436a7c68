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

#include "sbrt/scene.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace sbrt
{
    namespace
    {
        std::string face_name(std::size_t i) { return "face " + std::to_string(i); }

        int third_vertex(const Face &f, int e0, int e1)
        {
            for (int v : f.vertex_indices)
                if (v != e0 && v != e1)
                    return v;
            return -1;
        }

        // True if the face traverses e0 -> e1 in its winding order
        bool traverses(const Face &f, int e0, int e1)
        {
            for (int k = 0; k < 3; ++k)
                if (f.vertex_indices[k] == e0 && f.vertex_indices[(k + 1) % 3] == e1)
                    return true;
            return false;
        }

        Vec3 read_vec3(const nlohmann::json &j, const std::string &what)
        {
            if (!j.is_array() || j.size() != 3)
                throw SceneError(what + ": expected an array of 3 numbers");
            return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
        }

        nlohmann::json write_vec3(const Vec3 &v) { return nlohmann::json::array({v.x, v.y, v.z}); }

        bool strictly_inside_box(const Vec3 &p, const Vec3 &dims)
        {
            return p.x > 0.0 && p.x < dims.x && p.y > 0.0 && p.y < dims.y && p.z > 0.0 && p.z < dims.z;
        }
    }

    double exterior_angle(const std::vector<Vec3> &vertices, const Face &a, const Face &b, int e0, int e1)
    {
        const Vec3 p0 = vertices[e0];
        const Vec3 e = normalized(vertices[e1] - p0);
        auto in_face = [&](const Face &f)
        {
            const Vec3 w = vertices[third_vertex(f, e0, e1)] - p0;
            return normalized(w - dot(w, e) * e);
        };
        const Vec3 ta = in_face(a), tb = in_face(b);
        const double alpha = angle_between(ta, tb);
        // tb on the normal side of face a: the narrow sector is free space
        return dot(a.normal, tb) > 0.0 ? alpha : 2.0 * pi - alpha;
    }

    WedgeExtraction extract_wedges(const std::vector<Vec3> &vertices, const std::vector<Face> &faces,
                                   double coplanarity_threshold)
    {
        std::map<std::pair<int, int>, std::vector<int>> edge_faces;
        for (const auto &f : faces)
            for (int k = 0; k < 3; ++k)
            {
                int a = f.vertex_indices[k], b = f.vertex_indices[(k + 1) % 3];
                edge_faces[{std::min(a, b), std::max(a, b)}].push_back(f.id);
            }

        WedgeExtraction out;
        for (auto &[edge, ids] : edge_faces)
        {
            const std::string edge_name = "edge (" + std::to_string(edge.first) + ", " + std::to_string(edge.second) + ")";
            if (ids.size() > 2)
            {
                out.warnings.push_back("non-manifold " + edge_name + " shared by " + std::to_string(ids.size()) + " faces");
                continue;
            }
            if (ids.size() < 2)
                continue;

            std::sort(ids.begin(), ids.end());
            const Face &fa = faces[static_cast<std::size_t>(ids[0])];
            const Face &fb = faces[static_cast<std::size_t>(ids[1])];
            if (traverses(fa, edge.first, edge.second) == traverses(fb, edge.first, edge.second))
            {
                out.winding_conflicts.push_back("inconsistent winding of " + face_name(ids[0]) + " and " +
                                                face_name(ids[1]) + " across " + edge_name);
                continue;
            }

            const double opening = exterior_angle(vertices, fa, fb, edge.first, edge.second);
            if (std::abs(opening - pi) <= coplanarity_threshold)
                continue;

            Wedge w;
            w.id = static_cast<int>(out.wedges.size());
            w.edge = {edge.first, edge.second};
            w.faces = {ids[0], ids[1]};
            w.p0 = vertices[edge.first];
            w.p1 = vertices[edge.second];
            w.exterior_angle = opening;
            out.wedges.push_back(w);
        }
        return out;
    }

    Scene build_scene(std::vector<Vec3> vertices, const std::vector<FaceSpec> &faces,
                      std::vector<Material> materials, const Vec3 &tx, const Vec3 &rx, double frequency,
                      const std::optional<std::vector<WedgeSpec>> &wedges)
    {
        if (!(frequency > 0.0))
            throw SceneError("frequency must be positive");
        if (tx == rx)
            throw SceneError("tx and rx coincide");
        if (materials.empty() && !faces.empty())
            throw SceneError("scene has faces but no materials");
        for (std::size_t i = 0; i < materials.size(); ++i)
        {
            const auto &m = materials[i];
            if (!(m.relative_permittivity >= 1.0))
                throw SceneError("material " + std::to_string(i) + " (" + m.name + "): eps_r must be >= 1");
            if (!(m.conductivity >= 0.0))
                throw SceneError("material " + std::to_string(i) + " (" + m.name + "): sigma must be >= 0");
        }

        Scene scene;
        scene.tx = tx;
        scene.rx = rx;
        scene.frequency = frequency;
        scene.materials = std::move(materials);

        const int n_vertices = static_cast<int>(vertices.size());
        std::set<std::array<int, 3>> seen;
        for (std::size_t i = 0; i < faces.size(); ++i)
        {
            const auto &spec = faces[i];
            for (int v : spec.v)
                if (v < 0 || v >= n_vertices)
                    throw SceneError(face_name(i) + ": vertex index " + std::to_string(v) + " out of range");
            if (spec.material < 0 || spec.material >= static_cast<int>(scene.materials.size()))
                throw SceneError(face_name(i) + ": material index " + std::to_string(spec.material) + " out of range");

            auto key = spec.v;
            std::sort(key.begin(), key.end());
            if (!seen.insert(key).second)
                throw SceneError(face_name(i) + ": duplicate of an earlier face");

            const Vec3 n = cross(vertices[spec.v[1]] - vertices[spec.v[0]], vertices[spec.v[2]] - vertices[spec.v[0]]);
            const double area = 0.5 * norm(n);
            if (!(area > 1e-12))
                throw SceneError(face_name(i) + ": degenerate triangle (area " + std::to_string(area) + " m^2)");

            Face f;
            f.id = static_cast<int>(i);
            f.vertex_indices = spec.v;
            f.material_id = spec.material;
            f.normal = n / (2.0 * area);
            f.area = area;
            scene.faces.push_back(f);
        }
        scene.vertices = std::move(vertices);

        auto extraction = extract_wedges(scene.vertices, scene.faces);
        if (!extraction.winding_conflicts.empty())
            throw SceneError(extraction.winding_conflicts.front());

        if (!wedges)
        {
            scene.wedges = std::move(extraction.wedges);
            return scene;
        }

        const int n_faces = static_cast<int>(scene.faces.size());
        for (std::size_t i = 0; i < wedges->size(); ++i)
        {
            const auto &spec = (*wedges)[i];
            const std::string name = "wedge " + std::to_string(i);
            for (int v : spec.edge)
                if (v < 0 || v >= n_vertices)
                    throw SceneError(name + ": vertex index " + std::to_string(v) + " out of range");
            for (int f : spec.faces)
                if (f < 0 || f >= n_faces)
                    throw SceneError(name + ": face index " + std::to_string(f) + " out of range");
            if (spec.edge[0] == spec.edge[1] || spec.faces[0] == spec.faces[1])
                throw SceneError(name + ": repeated edge vertex or face");

            int e0 = std::min(spec.edge[0], spec.edge[1]), e1 = std::max(spec.edge[0], spec.edge[1]);
            int f0 = std::min(spec.faces[0], spec.faces[1]), f1 = std::max(spec.faces[0], spec.faces[1]);
            for (int f : {f0, f1})
            {
                const auto &vi = scene.faces[static_cast<std::size_t>(f)].vertex_indices;
                if (std::find(vi.begin(), vi.end(), e0) == vi.end() || std::find(vi.begin(), vi.end(), e1) == vi.end())
                    throw SceneError(name + ": " + face_name(static_cast<std::size_t>(f)) + " does not contain the edge");
            }

            Wedge w;
            w.id = static_cast<int>(i);
            w.edge = {e0, e1};
            w.faces = {f0, f1};
            w.p0 = scene.vertices[e0];
            w.p1 = scene.vertices[e1];
            w.exterior_angle = exterior_angle(scene.vertices, scene.faces[f0], scene.faces[f1], e0, e1);
            scene.wedges.push_back(w);
        }
        return scene;
    }

    Scene scene_from_json(const nlohmann::json &j)
    {
        try
        {
            std::vector<Vec3> vertices;
            for (std::size_t i = 0; i < j.at("vertices").size(); ++i)
                vertices.push_back(read_vec3(j["vertices"][i], "vertex " + std::to_string(i)));

            std::vector<Material> materials;
            for (const auto &m : j.at("materials"))
            {
                Material mat;
                mat.name = m.at("name").get<std::string>();
                mat.relative_permittivity = m.at("eps_r").get<double>();
                const auto &sigma = m.at("sigma");
                if (sigma.is_string() && sigma.get<std::string>() == "inf")
                    mat.conductivity = std::numeric_limits<double>::infinity();
                else
                    mat.conductivity = sigma.get<double>();
                materials.push_back(mat);
            }

            std::vector<FaceSpec> faces;
            for (std::size_t i = 0; i < j.at("faces").size(); ++i)
            {
                const auto &f = j["faces"][i];
                const auto &v = f.at("v");
                if (!v.is_array() || v.size() != 3)
                    throw SceneError(face_name(i) + ": expected 3 vertex indices");
                faces.push_back({{v[0].get<int>(), v[1].get<int>(), v[2].get<int>()}, f.value("material", 0)});
            }

            std::optional<std::vector<WedgeSpec>> wedges;
            if (j.contains("wedges"))
            {
                wedges.emplace();
                for (std::size_t i = 0; i < j["wedges"].size(); ++i)
                {
                    const auto &w = j["wedges"][i];
                    const auto &e = w.at("edge");
                    const auto &f = w.at("faces");
                    if (e.size() != 2 || f.size() != 2)
                        throw SceneError("wedge " + std::to_string(i) + ": expected 2 edge vertices and 2 faces");
                    wedges->push_back({{e[0].get<int>(), e[1].get<int>()}, {f[0].get<int>(), f[1].get<int>()}});
                }
            }

            return build_scene(std::move(vertices), faces, std::move(materials), read_vec3(j.at("tx"), "tx"),
                               read_vec3(j.at("rx"), "rx"), j.at("frequency_hz").get<double>(), wedges);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw SceneError(std::string("malformed scene: ") + e.what());
        }
    }

    nlohmann::json scene_to_json(const Scene &scene)
    {
        nlohmann::json j;
        j["frequency_hz"] = scene.frequency;
        j["tx"] = write_vec3(scene.tx);
        j["rx"] = write_vec3(scene.rx);
        j["materials"] = nlohmann::json::array();
        for (const auto &m : scene.materials)
        {
            nlohmann::json jm{{"name", m.name}, {"eps_r", m.relative_permittivity}};
            if (std::isinf(m.conductivity))
                jm["sigma"] = "inf";
            else
                jm["sigma"] = m.conductivity;
            j["materials"].push_back(jm);
        }
        j["vertices"] = nlohmann::json::array();
        for (const auto &v : scene.vertices)
            j["vertices"].push_back(write_vec3(v));
        j["faces"] = nlohmann::json::array();
        for (const auto &f : scene.faces)
            j["faces"].push_back({{"v", f.vertex_indices}, {"material", f.material_id}});
        j["wedges"] = nlohmann::json::array();
        for (const auto &w : scene.wedges)
            j["wedges"].push_back({{"edge", w.edge}, {"faces", w.faces}});
        return j;
    }

    Scene load_scene(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw SceneError("cannot open scene file '" + path + "'");
        nlohmann::json j;
        try
        {
            in >> j;
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw SceneError("cannot parse scene file '" + path + "': " + e.what());
        }
        return scene_from_json(j);
    }

    void save_scene(const Scene &scene, const std::string &path)
    {
        std::ofstream out(path);
        if (!out)
            throw SceneError("cannot write scene file '" + path + "'");
        out << scene_to_json(scene).dump(2) << '\n';
    }

    std::uint64_t scene_hash(const Scene &scene)
    {
        const std::string text = scene_to_json(scene).dump();
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

    Scene with_endpoints(const Scene &scene, const Vec3 &tx, const Vec3 &rx)
    {
        if (tx == rx)
            throw SceneError("tx and rx coincide");
        Scene out = scene;
        out.tx = tx;
        out.rx = rx;
        return out;
    }

    Scene transformed(const Scene &scene, const RigidTransform &tf)
    {
        Scene out = scene;
        for (auto &v : out.vertices)
            v = tf.apply_point(v);
        for (auto &f : out.faces)
            f.normal = tf.apply_direction(f.normal);
        for (auto &w : out.wedges)
        {
            w.p0 = out.vertices[w.edge[0]];
            w.p1 = out.vertices[w.edge[1]];
        }
        out.tx = tf.apply_point(scene.tx);
        out.rx = tf.apply_point(scene.rx);
        return out;
    }

    Scene make_shoebox(const Vec3 &dimensions, const Material &material, const Vec3 &tx, const Vec3 &rx,
                       double frequency, int subdivisions)
    {
        if (!(dimensions.x > 0.0 && dimensions.y > 0.0 && dimensions.z > 0.0))
            throw std::invalid_argument("Box dimensions must be positive.");
        if (subdivisions < 1)
            throw std::invalid_argument("Wall subdivisions must be at least 1.");
        if (!strictly_inside_box(tx, dimensions))
            throw std::invalid_argument("Tx must lie strictly inside the box.");
        if (!strictly_inside_box(rx, dimensions))
            throw std::invalid_argument("Rx must lie strictly inside the box.");

        const int s = subdivisions;
        const double L = dimensions.x, W = dimensions.y, H = dimensions.z;

        // Shared lattice vertices so that adjacent walls meet in common edges
        std::map<std::array<int, 3>, int> lattice;
        std::vector<Vec3> vertices;
        auto vertex = [&](const std::array<int, 3> &ijk)
        {
            auto [it, inserted] = lattice.emplace(ijk, static_cast<int>(vertices.size()));
            if (inserted)
                vertices.push_back({L * ijk[0] / s, W * ijk[1] / s, H * ijk[2] / s});
            return it->second;
        };

        // origin corner and two lattice axes per wall; cross(u, v) points inward
        struct Wall
        {
            std::array<int, 3> origin, u, v;
        };
        const std::array<Wall, 6> walls{{
            {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, // floor
            {{0, 0, s}, {0, 1, 0}, {1, 0, 0}}, // ceiling
            {{0, 0, 0}, {0, 0, 1}, {1, 0, 0}}, // y = 0
            {{0, s, 0}, {1, 0, 0}, {0, 0, 1}}, // y = W
            {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}}, // x = 0
            {{s, 0, 0}, {0, 0, 1}, {0, 1, 0}}, // x = L
        }};

        std::vector<FaceSpec> faces;
        for (const auto &wall : walls)
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j)
                {
                    auto at = [&](int a, int b)
                    {
                        std::array<int, 3> p{};
                        for (int k = 0; k < 3; ++k)
                            p[k] = wall.origin[k] + a * wall.u[k] + b * wall.v[k];
                        return vertex(p);
                    };
                    const int a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
                    faces.push_back({{a, b, c}, 0});
                    faces.push_back({{a, c, d}, 0});
                }

        return build_scene(std::move(vertices), faces, {material}, tx, rx, frequency);
    }

    Scene make_corner(double length_a, double length_b, double height, const Material &material, const Vec3 &tx,
                      const Vec3 &rx, double frequency)
    {
        if (!(length_a > 0.0 && length_b > 0.0 && height > 0.0))
            throw std::invalid_argument("Corner wall sizes must be positive.");
        std::vector<Vec3> vertices{{0, 0, 0}, {0, 0, height}, {length_a, 0, 0},
                                   {length_a, 0, height}, {0, length_b, 0}, {0, length_b, height}};
        std::vector<FaceSpec> faces{{{0, 2, 3}, 0}, {{0, 3, 1}, 0}, {{0, 1, 5}, 0}, {{0, 5, 4}, 0}};
        return build_scene(std::move(vertices), faces, {material}, tx, rx, frequency);
    }

    Scene make_block_field(double ground_half_size, const std::vector<Block> &blocks, const Material &ground,
                           const Material &building, const Vec3 &tx, const Vec3 &rx, double frequency)
    {
        if (!(ground_half_size > 0.0))
            throw std::invalid_argument("Ground size must be positive.");
        const double g = ground_half_size;
        std::vector<Vec3> vertices{{-g, -g, 0}, {g, -g, 0}, {g, g, 0}, {-g, g, 0}};
        std::vector<FaceSpec> faces{{{0, 1, 2}, 0}, {{0, 2, 3}, 0}};

        for (const auto &b : blocks)
        {
            if (!(b.x1 > b.x0 && b.y1 > b.y0 && b.height > 0.0))
                throw std::invalid_argument("Block extents must be positive.");
            const int o = static_cast<int>(vertices.size());
            // bottom ring 0..3, top ring 4..7, counter-clockwise seen from above
            for (double z : {0.0, b.height})
            {
                vertices.push_back({b.x0, b.y0, z});
                vertices.push_back({b.x1, b.y0, z});
                vertices.push_back({b.x1, b.y1, z});
                vertices.push_back({b.x0, b.y1, z});
            }
            for (int k = 0; k < 4; ++k)
            {
                const int a = o + k, c = o + (k + 1) % 4;
                faces.push_back({{a, c, c + 4}, 1});
                faces.push_back({{a, c + 4, a + 4}, 1});
            }
            faces.push_back({{o + 4, o + 5, o + 6}, 1});
            faces.push_back({{o + 4, o + 6, o + 7}, 1});
        }
        return build_scene(std::move(vertices), faces, {ground, building}, tx, rx, frequency);
    }

    Material concrete() { return {"concrete", 5.31, 0.0326}; }

    Material perfect_conductor() { return {"pec", 1.0, std::numeric_limits<double>::infinity()}; }
}
