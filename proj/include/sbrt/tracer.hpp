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
#include "sbrt/launcher.hpp"
#include "sbrt/scene.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sbrt
{
    enum class InteractionKind
    {
        reflection,
        diffraction
    };

    struct Interaction
    {
        InteractionKind kind = InteractionKind::reflection;
        int id = 0;     // face id for reflections, wedge id for diffractions
        Vec3 point;     // interaction point [m]
        Vec3 outgoing;  // unit direction leaving the point; the recorded direction for diffractions
    };

    // A Tx -> ... -> Rx path found by the shooting tracer, the refiner or the image
    // method. Image-method paths carry zero miss distance and error angle.
    struct PropagationPath
    {
        std::vector<Interaction> interactions;
        Vec3 launch_direction;  // AOD, direction of the first segment
        Vec3 arrival_direction; // AOA, travel direction of the last segment (pointing into Rx)
        Vec3 end_point;         // foot of Rx on the last segment (Rx itself for exact paths)
        double length = 0.0;    // d_ray: Tx -> interactions -> end_point [m]
        double miss_distance = 0.0; // d_Rx_ray [m]
        double error_angle = 0.0;   // atan(miss_distance / length) [rad]
        RayCone source_cone{};
        std::size_t grid_index = 0;

        int reflection_order() const;
        int diffraction_order() const;
    };

    using ImagePath = PropagationPath;

    // "LOS" or e.g. "R3-R7-D0"; identifies the interaction kind/id sequence
    std::string sequence_key(const PropagationPath &path);

    struct TraceConfig
    {
        int max_reflection_order = 2;
        int max_diffraction_order = 0; // 0 or 1
        int n = 21;
        LaunchScheme scheme = LaunchScheme::equiangular;
        int keller_samples = 72;
    };

    // ---------- Scene queries shared with the refiner and the image method ----------

    struct FaceHit
    {
        int face = -1;
        double t = std::numeric_limits<double>::infinity();
        Vec3 point;
    };

    // Nearest face hit with t > eps_hit, skipping the listed faces
    FaceHit first_hit(const Scene &scene, const Ray &ray, std::span<const int> skip = {});

    // True if any face other than `skip` blocks the open segment a -> b
    bool segment_blocked(const Scene &scene, const Vec3 &a, const Vec3 &b, std::span<const int> skip = {});

    // Orthonormal frame around a wedge edge: x lies in the first face pointing away
    // from the edge, y = edge x x. Keller-cone azimuths are measured in this frame.
    struct WedgeFrame
    {
        Vec3 origin, edge, x, y;
        double azimuth(const Vec3 &dir) const;
        // Direction on the Keller cone with cos(beta) = incident . edge
        Vec3 keller_direction(const Vec3 &incident, double azimuth) const;
    };
    WedgeFrame wedge_frame(const Scene &scene, const Wedge &wedge);

    // True if a direction leaving the edge points into the wedge's free space
    bool in_free_space(const Scene &scene, const Wedge &wedge, const Vec3 &dir);

    // Parameter s along the edge line (from p0, along the unit edge direction) of
    // the point closest to the ray's supporting line, and the ray parameter t of
    // the closest point on the ray. Empty if ray and edge are parallel.
    struct LineApproach
    {
        double s, t, distance;
    };
    std::optional<LineApproach> closest_approach(const Ray &ray, const Wedge &wedge);

    // Barycentric inside test with a small tolerance plus plane distance check.
    bool point_on_face(const Scene &scene, int face_id, const Vec3 &p, double tol = 1e-6);

    // ---------- Shooting and bouncing ----------

    // Walks every launch cone through the scene and returns all received
    // candidates (before duplicate removal and validity testing).
    std::vector<PropagationPath> shoot(const Scene &scene, const LaunchGrid &grid, const TraceConfig &cfg);

    // Keeps the smallest-error path per interaction sequence; ties go to the
    // smaller launch-grid index. Output ordered by (order, sequence key).
    std::vector<PropagationPath> dedup_paths(const std::vector<PropagationPath> &candidates);

    // Collision validity: every reflection point inside its face with the path
    // arriving and leaving on the front side, every diffraction point on its edge
    // segment with both neighbours in free space, and no segment of
    // Tx -> points -> Rx blocked by another face.
    // face_tolerance widens the reflection-point bounds test.
    bool validate_path(const PropagationPath &path, const Scene &scene, double face_tolerance = 1e-6);

    // Assigns every reflection to the lowest-id face that is coplanar with its
    // recorded face (same plane and orientation) and contains the point within
    // tol. Returns false if some reflection point lies on no such face.
    bool relabel_coplanar(PropagationPath &path, const Scene &scene, double tol = 1e-6);

    // shoot -> dedup_paths -> validate_path
    std::vector<PropagationPath> trace_sbr(const Scene &scene, const LaunchGrid &grid, const TraceConfig &cfg);
    std::vector<PropagationPath> trace_sbr(const Scene &scene, const TraceConfig &cfg);

    // Polyline vertices Tx, interaction points..., Rx
    std::vector<Vec3> path_polyline(const PropagationPath &path, const Scene &scene);
}
