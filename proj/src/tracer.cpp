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

#include "sbrt/tracer.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace sbrt
{
    namespace
    {
        bool contains(std::span<const int> ids, int id)
        {
            return std::find(ids.begin(), ids.end(), id) != ids.end();
        }

        // Faces touching an interaction point; skipped when testing segments that
        // start or end there.
        std::vector<int> faces_at(const Scene &scene, const Interaction &it)
        {
            if (it.kind == InteractionKind::reflection)
                return {it.id};
            const auto &w = scene.wedges[static_cast<std::size_t>(it.id)];
            return {w.faces[0], w.faces[1]};
        }

        // One ray of a launch cone, possibly after some interactions
        struct Walker
        {
            Vec3 origin;
            Vec3 direction;
            double travelled = 0.0;
            std::vector<Interaction> interactions;
            int reflections = 0;
            int diffractions = 0;
            std::vector<int> skip_faces;
            int skip_wedge = -1;
        };

        class Shooter
        {
        public:
            Shooter(const Scene &scene, const TraceConfig &cfg) : scene_(scene), cfg_(cfg) {}

            void launch(std::size_t index, const RayCone &cone, std::vector<PropagationPath> &out)
            {
                index_ = index;
                cone_ = cone;
                tan_half_ = std::tan(cone.half_angle);
                out_ = &out;
                Walker w;
                w.origin = cone.origin;
                w.direction = cone.axis;
                walk(w);
            }

        private:
            void walk(const Walker &w)
            {
                const Ray ray{w.origin, w.direction};
                const FaceHit hit = first_hit(scene_, ray, w.skip_faces);

                receive(w, hit.t);

                if (w.diffractions < cfg_.max_diffraction_order)
                    diffract(w, ray);

                if (w.reflections < cfg_.max_reflection_order && hit.face >= 0)
                {
                    const Vec3 &n = scene_.faces[static_cast<std::size_t>(hit.face)].normal;
                    // back sides absorb
                    if (dot(w.direction, n) < 0.0)
                    {
                        Walker child;
                        child.origin = hit.point;
                        child.direction = mirror_reflect(w.direction, n);
                        child.travelled = w.travelled + hit.t;
                        child.interactions = w.interactions;
                        child.interactions.push_back({InteractionKind::reflection, hit.face, hit.point, child.direction});
                        child.reflections = w.reflections + 1;
                        child.diffractions = w.diffractions;
                        child.skip_faces = {hit.face};
                        walk(child);
                    }
                }
            }

            void receive(const Walker &w, double t_block)
            {
                const Ray ray{w.origin, w.direction};
                const auto foot = point_to_ray_distance(scene_.rx, ray);
                if (!(foot.along > 0.0) || foot.along >= t_block)
                    return;
                const double length = w.travelled + foot.along;
                const double error = std::atan2(foot.distance, length);
                if (error > cone_.half_angle)
                    return;

                PropagationPath p;
                p.interactions = w.interactions;
                p.launch_direction = p.interactions.empty()
                                         ? cone_.axis
                                         : normalized(p.interactions.front().point - cone_.origin);
                p.arrival_direction = w.direction;
                p.end_point = ray.at(foot.along);
                p.length = length;
                p.miss_distance = foot.distance;
                p.error_angle = error;
                p.source_cone = cone_;
                p.grid_index = index_;
                out_->push_back(std::move(p));
            }

            void diffract(const Walker &w, const Ray &ray)
            {
                for (const auto &wedge : scene_.wedges)
                {
                    if (wedge.id == w.skip_wedge)
                        continue;
                    const auto approach = closest_approach(ray, wedge);
                    if (!approach || approach->t <= eps_hit)
                        continue;
                    // interior edge points only
                    if (approach->s <= 0.0 || approach->s >= wedge.length())
                        continue;
                    if (approach->distance > (w.travelled + approach->t) * tan_half_)
                        continue;

                    // visibility of the edge point also covers faces hit before it
                    const Vec3 q = wedge.p0 + approach->s * wedge.direction();
                    std::vector<int> skip = w.skip_faces;
                    skip.push_back(wedge.faces[0]);
                    skip.push_back(wedge.faces[1]);
                    if (segment_blocked(scene_, w.origin, q, skip))
                        continue;

                    const Vec3 incident = normalized(q - w.origin);
                    if (!in_free_space(scene_, wedge, -incident))
                        continue;
                    const WedgeFrame frame = wedge_frame(scene_, wedge);
                    const int samples = cfg_.keller_samples;
                    for (int k = 0; k < samples; ++k)
                    {
                        const double phi = 2.0 * pi * (k + 0.5) / samples;
                        const Vec3 dir = frame.keller_direction(incident, phi);
                        if (!in_free_space(scene_, wedge, dir))
                            continue;

                        Walker child;
                        child.origin = q;
                        child.direction = dir;
                        child.travelled = w.travelled + distance(w.origin, q);
                        child.interactions = w.interactions;
                        child.interactions.push_back({InteractionKind::diffraction, wedge.id, q, dir});
                        child.reflections = w.reflections;
                        child.diffractions = w.diffractions + 1;
                        child.skip_faces = {wedge.faces[0], wedge.faces[1]};
                        child.skip_wedge = wedge.id;
                        walk(child);
                    }
                }
            }

            const Scene &scene_;
            const TraceConfig &cfg_;
            std::size_t index_ = 0;
            RayCone cone_{};
            double tan_half_ = 0.0;
            std::vector<PropagationPath> *out_ = nullptr;
        };
    }

    int PropagationPath::reflection_order() const
    {
        return static_cast<int>(std::count_if(interactions.begin(), interactions.end(), [](const Interaction &i)
                                              { return i.kind == InteractionKind::reflection; }));
    }

    int PropagationPath::diffraction_order() const
    {
        return static_cast<int>(interactions.size()) - reflection_order();
    }

    std::string sequence_key(const PropagationPath &path)
    {
        if (path.interactions.empty())
            return "LOS";
        std::string key;
        for (const auto &it : path.interactions)
        {
            if (!key.empty())
                key += '-';
            key += it.kind == InteractionKind::reflection ? 'R' : 'D';
            key += std::to_string(it.id);
        }
        return key;
    }

    FaceHit first_hit(const Scene &scene, const Ray &ray, std::span<const int> skip)
    {
        FaceHit best;
        for (const auto &f : scene.faces)
        {
            if (contains(skip, f.id))
                continue;
            const auto hit = intersect_triangle(ray, scene.triangle(f.id));
            if (hit && hit->t < best.t)
            {
                best.face = f.id;
                best.t = hit->t;
            }
        }
        if (best.face >= 0)
            best.point = ray.at(best.t);
        return best;
    }

    bool segment_blocked(const Scene &scene, const Vec3 &a, const Vec3 &b, std::span<const int> skip)
    {
        const double len = distance(a, b);
        if (len <= 2.0 * eps_hit)
            return false;
        const Ray ray{a, (b - a) / len};
        for (const auto &f : scene.faces)
        {
            if (contains(skip, f.id))
                continue;
            const auto hit = intersect_triangle(ray, scene.triangle(f.id));
            if (hit && hit->t < len - eps_hit)
                return true;
        }
        return false;
    }

    double WedgeFrame::azimuth(const Vec3 &dir) const
    {
        return std::atan2(dot(dir, y), dot(dir, x));
    }

    Vec3 WedgeFrame::keller_direction(const Vec3 &incident, double azimuth) const
    {
        const double cos_beta = std::clamp(dot(incident, edge), -1.0, 1.0);
        const double sin_beta = std::sqrt(std::max(0.0, 1.0 - cos_beta * cos_beta));
        return normalized(cos_beta * edge + sin_beta * (std::cos(azimuth) * x + std::sin(azimuth) * y));
    }

    WedgeFrame wedge_frame(const Scene &scene, const Wedge &wedge)
    {
        WedgeFrame f;
        f.origin = wedge.p0;
        f.edge = wedge.direction();
        const auto &face = scene.faces[static_cast<std::size_t>(wedge.faces[0])];
        Vec3 inside;
        for (int v : face.vertex_indices)
            if (v != wedge.edge[0] && v != wedge.edge[1])
                inside = scene.vertices[v] - wedge.p0;
        f.x = normalized(inside - dot(inside, f.edge) * f.edge);
        f.y = cross(f.edge, f.x);
        return f;
    }

    bool in_free_space(const Scene &scene, const Wedge &wedge, const Vec3 &dir)
    {
        const Vec3 &na = scene.faces[static_cast<std::size_t>(wedge.faces[0])].normal;
        const Vec3 &nb = scene.faces[static_cast<std::size_t>(wedge.faces[1])].normal;
        const double da = dot(dir, na), db = dot(dir, nb);
        if (wedge.exterior_angle > pi)
            return da > 0.0 || db > 0.0;
        return da > 0.0 && db > 0.0;
    }

    std::optional<LineApproach> closest_approach(const Ray &ray, const Wedge &wedge)
    {
        const Vec3 e = wedge.direction();
        const Vec3 w0 = ray.origin - wedge.p0;
        const double b = dot(ray.direction, e);
        const double denom = 1.0 - b * b;
        if (denom < 1e-12)
            return std::nullopt;
        const double d = dot(ray.direction, w0), f = dot(e, w0);
        const double t = (b * f - d) / denom;
        const double s = (f - b * d) / denom;
        const double dist = distance(ray.at(t), wedge.p0 + s * e);
        return LineApproach{s, t, dist};
    }

    bool point_on_face(const Scene &scene, int face_id, const Vec3 &p, double tol)
    {
        const auto tri = scene.triangle(face_id);
        const Vec3 &n = scene.faces[static_cast<std::size_t>(face_id)].normal;
        if (std::abs(dot(p - tri[0], n)) > tol)
            return false;
        for (int k = 0; k < 3; ++k)
        {
            const Vec3 &a = tri[k], &b = tri[(k + 1) % 3];
            const Vec3 inward = normalized(cross(n, b - a));
            if (dot(p - a, inward) < -tol)
                return false;
        }
        return true;
    }

    std::vector<PropagationPath> shoot(const Scene &scene, const LaunchGrid &grid, const TraceConfig &cfg)
    {
        std::vector<PropagationPath> out;
        Shooter shooter(scene, cfg);
        for (std::size_t i = 0; i < grid.directions.size(); ++i)
            shooter.launch(i, RayCone{scene.tx, grid.directions[i], grid.cone_half_angle}, out);
        return out;
    }

    std::vector<PropagationPath> dedup_paths(const std::vector<PropagationPath> &candidates)
    {
        std::map<std::string, const PropagationPath *> best;
        for (const auto &p : candidates)
        {
            auto [it, inserted] = best.emplace(sequence_key(p), &p);
            if (inserted)
                continue;
            const PropagationPath *cur = it->second;
            if (p.error_angle < cur->error_angle ||
                (p.error_angle == cur->error_angle && p.grid_index < cur->grid_index))
                it->second = &p;
        }

        std::vector<PropagationPath> out;
        out.reserve(best.size());
        for (const auto &[key, p] : best)
            out.push_back(*p);
        std::stable_sort(out.begin(), out.end(), [](const PropagationPath &a, const PropagationPath &b)
                         { return a.interactions.size() < b.interactions.size(); });
        return out;
    }

    std::vector<Vec3> path_polyline(const PropagationPath &path, const Scene &scene)
    {
        std::vector<Vec3> pts{scene.tx};
        for (const auto &it : path.interactions)
            pts.push_back(it.point);
        pts.push_back(scene.rx);
        return pts;
    }

    bool relabel_coplanar(PropagationPath &path, const Scene &scene, double tol)
    {
        for (auto &it : path.interactions)
        {
            if (it.kind != InteractionKind::reflection)
                continue;
            const auto &face = scene.faces[static_cast<std::size_t>(it.id)];
            const Vec3 &on_plane = scene.vertices[face.vertex_indices[0]];
            int owner = -1;
            for (const auto &g : scene.faces)
            {
                if (dot(g.normal, face.normal) < 1.0 - 1e-12 ||
                    std::abs(dot(scene.vertices[g.vertex_indices[0]] - on_plane, face.normal)) > 1e-9)
                    continue;
                if (point_on_face(scene, g.id, it.point, tol))
                {
                    owner = g.id;
                    break;
                }
            }
            if (owner < 0)
                return false;
            it.id = owner;
        }
        return true;
    }

    bool validate_path(const PropagationPath &path, const Scene &scene, double face_tolerance)
    {
        const auto pts = path_polyline(path, scene);
        const auto &its = path.interactions;

        for (std::size_t k = 0; k < its.size(); ++k)
        {
            const Vec3 &prev = pts[k], &p = pts[k + 1], &next = pts[k + 2];
            const auto &it = its[k];
            if (it.kind == InteractionKind::reflection)
            {
                if (it.id < 0 || it.id >= static_cast<int>(scene.faces.size()))
                    return false;
                const Vec3 &n = scene.faces[static_cast<std::size_t>(it.id)].normal;
                if (!point_on_face(scene, it.id, p, face_tolerance))
                    return false;
                if (!(dot(prev - p, n) > 0.0) || !(dot(next - p, n) > 0.0))
                    return false;
            }
            else
            {
                if (it.id < 0 || it.id >= static_cast<int>(scene.wedges.size()))
                    return false;
                const auto &w = scene.wedges[static_cast<std::size_t>(it.id)];
                const Vec3 e = w.direction();
                const double s = dot(p - w.p0, e);
                if (distance(p, w.p0 + s * e) > 1e-6 || s <= 0.0 || s >= w.length())
                    return false;
                if (!in_free_space(scene, w, normalized(prev - p)) || !in_free_space(scene, w, normalized(next - p)))
                    return false;
            }
        }

        for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        {
            std::vector<int> skip;
            if (k > 0)
                skip = faces_at(scene, its[k - 1]);
            if (k < its.size())
            {
                const auto more = faces_at(scene, its[k]);
                skip.insert(skip.end(), more.begin(), more.end());
            }
            if (segment_blocked(scene, pts[k], pts[k + 1], skip))
                return false;
        }
        return true;
    }

    std::vector<PropagationPath> trace_sbr(const Scene &scene, const LaunchGrid &grid, const TraceConfig &cfg)
    {
        auto paths = dedup_paths(shoot(scene, grid, cfg));
        std::erase_if(paths, [&](const PropagationPath &p)
                      { return !validate_path(p, scene); });
        return paths;
    }

    std::vector<PropagationPath> trace_sbr(const Scene &scene, const TraceConfig &cfg)
    {
        return trace_sbr(scene, make_launch_grid(cfg.scheme, cfg.n), cfg);
    }
}
