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

#include "sbrt/refiner.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sbrt
{
    namespace
    {
        const double inv_sqrt3 = 1.0 / std::sqrt(3.0);

        // Fan offsets in units of the fan step, recorded direction first
        constexpr std::array<double, diffraction_fan_size> fan_offsets{0.0, -1.0, -0.5, 0.5, 1.0};

        struct Partial
        {
            Vec3 origin;
            Vec3 direction;
            double travelled = 0.0;
            std::vector<Interaction> interactions;
        };

        class Relauncher
        {
        public:
            Relauncher(const Scene &scene, const PropagationPath &reference, const RayCone &cone,
                       std::vector<PropagationPath> &out)
                : scene_(scene), reference_(reference), cone_(cone), out_(out)
            {
            }

            void run()
            {
                Partial start;
                start.origin = cone_.origin;
                start.direction = cone_.axis;
                start.interactions.reserve(reference_.interactions.size());
                step(start, 0);
            }

        private:
            void step(Partial &cur, std::size_t k)
            {
                if (k == reference_.interactions.size())
                {
                    finish(cur);
                    return;
                }

                const auto &rec = reference_.interactions[k];
                if (rec.kind == InteractionKind::reflection)
                {
                    const auto &face = scene_.faces[static_cast<std::size_t>(rec.id)];
                    const double approach = dot(cur.direction, face.normal);
                    if (!(approach < 0.0))
                        return;
                    const Vec3 &on_plane = scene_.vertices[face.vertex_indices[0]];
                    const double t = dot(on_plane - cur.origin, face.normal) / approach;
                    if (!(t > 0.0))
                        return;

                    Partial next;
                    const Vec3 p = cur.origin + t * cur.direction;
                    next.origin = p;
                    next.direction = mirror_reflect(cur.direction, face.normal);
                    next.travelled = cur.travelled + t;
                    next.interactions = cur.interactions;
                    next.interactions.push_back({InteractionKind::reflection, rec.id, p, next.direction});
                    step(next, k + 1);
                    return;
                }

                const auto &wedge = scene_.wedges[static_cast<std::size_t>(rec.id)];
                const auto approach = closest_approach(Ray{cur.origin, cur.direction}, wedge);
                if (!approach || !(approach->t > 0.0))
                    return;

                const Vec3 e = wedge.direction();
                const Vec3 q = wedge.p0 + approach->s * e;
                const double leg = distance(cur.origin, q);
                if (!(leg > 0.0))
                    return;
                const Vec3 incident = (q - cur.origin) / leg;
                const WedgeFrame frame = wedge_frame(scene_, wedge);
                const double recorded = frame.azimuth(rec.outgoing);

                // angular offset of the diffracted direction is sin(beta) times the azimuth offset
                const double sin_beta = norm(cross(incident, e));
                const double azimuth_step = cone_.half_angle / std::max(sin_beta, 1e-12);

                for (double offset : fan_offsets)
                {
                    Partial next;
                    next.origin = q;
                    next.direction = frame.keller_direction(incident, recorded + offset * azimuth_step);
                    next.travelled = cur.travelled + leg;
                    next.interactions = cur.interactions;
                    next.interactions.push_back({InteractionKind::diffraction, rec.id, q, next.direction});
                    step(next, k + 1);
                }
            }

            void finish(const Partial &cur)
            {
                const Ray ray{cur.origin, cur.direction};
                const auto foot = point_to_ray_distance(scene_.rx, ray);
                if (!(foot.along > 0.0))
                    return;

                PropagationPath p;
                p.interactions = cur.interactions;
                p.launch_direction = p.interactions.empty() ? cone_.axis
                                                            : normalized(p.interactions.front().point - cone_.origin);
                p.arrival_direction = cur.direction;
                p.end_point = ray.at(foot.along);
                p.length = cur.travelled + foot.along;
                p.miss_distance = foot.distance;
                p.error_angle = std::atan2(foot.distance, p.length);
                p.source_cone = cone_;
                p.grid_index = reference_.grid_index;
                out_.push_back(std::move(p));
            }

            const Scene &scene_;
            const PropagationPath &reference_;
            const RayCone &cone_;
            std::vector<PropagationPath> &out_;
        };
    }

    std::array<RayCone, 6> sub_cones(const RayCone &cone)
    {
        const double child = cone.half_angle * inv_sqrt3;
        const Vec3 u = any_perpendicular(cone.axis);
        const Vec3 v = cross(cone.axis, u);
        const double ct = std::cos(child), st = std::sin(child);

        std::array<RayCone, 6> out{};
        for (int k = 0; k < 6; ++k)
        {
            const double az = k * pi / 3.0;
            const Vec3 tilt = std::cos(az) * u + std::sin(az) * v;
            out[static_cast<std::size_t>(k)] = RayCone{cone.origin, normalized(ct * cone.axis + st * tilt), child};
        }
        return out;
    }

    std::string to_string(Termination t)
    {
        switch (t)
        {
        case Termination::tolerance:
            return "tolerance";
        case Termination::max_iterations:
            return "max_iterations";
        case Termination::lost_path:
            return "lost_path";
        }
        return "unknown";
    }

    std::vector<PropagationPath> relaunch(const Scene &scene, const PropagationPath &reference, const RayCone &cone)
    {
        std::vector<PropagationPath> out;
        Relauncher(scene, reference, cone, out).run();
        return out;
    }

    RefineResult refine_path(const PropagationPath &path, const Scene &scene, const RefineConfig &cfg)
    {
        if (cfg.max_iterations < 1)
            throw std::invalid_argument("Refinement needs at least one iteration.");

        RefineResult result;
        result.path = path;
        auto &trace = result.trace;

        auto record = [&](int i, const PropagationPath &p, int candidates)
        {
            RefinementStep s;
            s.iteration = i;
            s.cone = p.source_cone;
            s.error_angle = p.error_angle;
            s.length = p.length;
            s.candidates = candidates;
            if (cfg.keep_history)
                s.path = p;
            trace.iterations.push_back(std::move(s));
        };

        record(0, path, 1);
        trace.terminated_by = Termination::max_iterations;

        if (path.error_angle <= cfg.angle_tolerance)
            trace.terminated_by = Termination::tolerance;
        else
        {
            PropagationPath current = path;
            for (int i = 1; i <= cfg.max_iterations; ++i)
            {
                std::optional<PropagationPath> chosen;
                int evaluated = 0;
                for (const auto &child : sub_cones(current.source_cone))
                    for (auto &cand : relaunch(scene, current, child))
                    {
                        ++evaluated;
                        // Rx has to be inside the sub-cone; strict comparison keeps
                        // the lower sub-cone index on ties
                        if (cand.error_angle > cand.source_cone.half_angle + reception_slack)
                            continue;
                        if (!chosen || cand.error_angle < chosen->error_angle)
                            chosen = std::move(cand);
                    }

                if (!chosen)
                {
                    trace.terminated_by = Termination::lost_path;
                    result.path = path;
                    break;
                }

                record(i, *chosen, evaluated);
                if (chosen->error_angle < result.path.error_angle)
                    result.path = *chosen;
                current = std::move(*chosen);

                if (current.error_angle <= cfg.angle_tolerance)
                {
                    trace.terminated_by = Termination::tolerance;
                    break;
                }
            }
        }

        result.valid = validate_path(result.path, scene);
        return result;
    }

    std::vector<RefineResult> refine_paths(const std::vector<PropagationPath> &paths, const Scene &scene,
                                           const RefineConfig &cfg)
    {
        std::vector<RefineResult> out;
        out.reserve(paths.size());
        for (const auto &p : paths)
            out.push_back(refine_path(p, scene, cfg));
        return out;
    }

    std::vector<PropagationPath> settle_paths(const std::vector<RefineResult> &results, const Scene &scene)
    {
        std::vector<PropagationPath> kept;
        for (const auto &r : results)
        {
            if (r.trace.terminated_by == Termination::lost_path)
                continue;
            PropagationPath p = r.path;
            const double tol = std::max(1e-6, p.miss_distance);
            if (relabel_coplanar(p, scene, tol) && validate_path(p, scene, tol))
                kept.push_back(std::move(p));
        }
        return dedup_paths(kept);
    }

    double error_decibels(double before, double after)
    {
        if (!(before > 0.0) || after < 0.0)
            throw std::invalid_argument("Error magnitudes must be positive.");
        if (after == 0.0)
            return std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(before / after);
    }
}
