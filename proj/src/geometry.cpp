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

#include "sbrt/geometry.hpp"

namespace sbrt
{
    Vec3 any_perpendicular(const Vec3 &u)
    {
        const double ax = std::abs(u.x), ay = std::abs(u.y), az = std::abs(u.z);
        Vec3 helper;
        if (ax <= ay && ax <= az)
            helper = {1.0, 0.0, 0.0};
        else if (ay <= az)
            helper = {0.0, 1.0, 0.0};
        else
            helper = {0.0, 0.0, 1.0};
        return normalized(helper - dot(helper, u) * u);
    }

    std::optional<TriangleHit> intersect_triangle(const Ray &ray, const std::array<Vec3, 3> &tri)
    {
        const Vec3 e1 = tri[1] - tri[0];
        const Vec3 e2 = tri[2] - tri[0];
        const Vec3 p = cross(ray.direction, e2);
        const double det = dot(e1, p);

        // Parallel to the plane (relative to the triangle size)
        if (std::abs(det) <= 1e-14 * norm(e1) * norm(e2))
            return std::nullopt;

        const double inv = 1.0 / det;
        const Vec3 s = ray.origin - tri[0];
        const double u = dot(s, p) * inv;
        if (u < 0.0 || u > 1.0)
            return std::nullopt;

        const Vec3 q = cross(s, e1);
        const double v = dot(ray.direction, q) * inv;
        if (v < 0.0 || u + v > 1.0)
            return std::nullopt;

        const double t = dot(e2, q) * inv;
        if (t <= eps_hit)
            return std::nullopt;
        return TriangleHit{t, u, v};
    }

    Vec3 mirror_reflect(const Vec3 &incident, const Vec3 &normal)
    {
        return incident - 2.0 * dot(incident, normal) * normal;
    }

    Vec3 mirror_point(const Vec3 &p, const Vec3 &on_plane, const Vec3 &normal)
    {
        return p - 2.0 * dot(p - on_plane, normal) * normal;
    }

    LineDistance point_to_ray_distance(const Vec3 &p, const Ray &ray)
    {
        const Vec3 w = p - ray.origin;
        return {norm(cross(w, ray.direction)), dot(w, ray.direction)};
    }

    double angle_between(const Vec3 &u, const Vec3 &v)
    {
        return std::atan2(norm(cross(u, v)), dot(u, v));
    }

    SpherePoint to_sphere_point(const Vec3 &dir)
    {
        double az = std::atan2(dir.y, dir.x);
        if (az <= -pi)
            az = pi;
        return {az, std::atan2(dir.z, std::hypot(dir.x, dir.y))};
    }

    Vec3 from_sphere_point(const SpherePoint &p)
    {
        const double c = std::cos(p.pitch);
        return {c * std::cos(p.azimuth), c * std::sin(p.azimuth), std::sin(p.pitch)};
    }

    PlanePoint equal_area_project(const SpherePoint &p)
    {
        return {p.azimuth * std::cos(p.pitch), p.pitch};
    }

    Vec3 rotate(const Vec3 &v, const Vec3 &k, double angle)
    {
        const double c = std::cos(angle), s = std::sin(angle);
        return v * c + cross(k, v) * s + k * (dot(k, v) * (1.0 - c));
    }

    RigidTransform RigidTransform::from_axis_angle(const Vec3 &axis, double angle, const Vec3 &shift)
    {
        const Vec3 k = normalized(axis);
        RigidTransform tf;
        const Vec3 cx = rotate({1, 0, 0}, k, angle);
        const Vec3 cy = rotate({0, 1, 0}, k, angle);
        const Vec3 cz = rotate({0, 0, 1}, k, angle);
        tf.rot = {cx.x, cy.x, cz.x, cx.y, cy.y, cz.y, cx.z, cy.z, cz.z};
        tf.shift = shift;
        return tf;
    }
}
