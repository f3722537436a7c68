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

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

namespace sbrt
{
    constexpr double pi = std::numbers::pi;
    constexpr double deg = pi / 180.0;

    // Self-intersection offset for rays leaving a surface [m]
    constexpr double eps_hit = 1e-6;

    struct Vec3
    {
        double x = 0.0, y = 0.0, z = 0.0;

        constexpr Vec3 &operator+=(const Vec3 &o)
        {
            x += o.x, y += o.y, z += o.z;
            return *this;
        }
        constexpr Vec3 &operator-=(const Vec3 &o)
        {
            x -= o.x, y -= o.y, z -= o.z;
            return *this;
        }
        constexpr Vec3 &operator*=(double s)
        {
            x *= s, y *= s, z *= s;
            return *this;
        }
        constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
        friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
    };

    constexpr Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
    constexpr Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
    constexpr Vec3 operator-(const Vec3 &a) { return {-a.x, -a.y, -a.z}; }
    constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
    constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
    constexpr Vec3 operator/(const Vec3 &a, double s) { return {a.x / s, a.y / s, a.z / s}; }

    constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
    constexpr Vec3 cross(const Vec3 &a, const Vec3 &b)
    {
        return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
    }
    inline double norm(const Vec3 &a) { return std::hypot(a.x, a.y, a.z); }
    inline double distance(const Vec3 &a, const Vec3 &b) { return norm(a - b); }
    inline Vec3 normalized(const Vec3 &a) { return a / norm(a); }

    // Unit vector perpendicular to a unit vector u. Deterministic: built from the
    // coordinate axis least aligned with u.
    Vec3 any_perpendicular(const Vec3 &u);

    struct Ray
    {
        Vec3 origin;
        Vec3 direction; // unit
        Vec3 at(double t) const { return origin + t * direction; }
    };

    struct RayCone
    {
        Vec3 origin;
        Vec3 axis;         // unit
        double half_angle; // (0, pi/2)
    };

    // Azimuth in (-pi, pi], pitch in [-pi/2, pi/2]
    struct SpherePoint
    {
        double azimuth = 0.0;
        double pitch = 0.0;
    };

    struct TriangleHit
    {
        double t;
        double u, v; // barycentric weights of the 2nd and 3rd vertex
    };

    // Moeller-Trumbore. Returns the hit if t > eps_hit and the point lies inside
    // the closed triangle.
    std::optional<TriangleHit> intersect_triangle(const Ray &ray, const std::array<Vec3, 3> &tri);

    // r = d - 2 (d.n) n
    Vec3 mirror_reflect(const Vec3 &incident, const Vec3 &normal);

    // Mirror image of a point across the plane through `on_plane` with unit normal `normal`.
    Vec3 mirror_point(const Vec3 &p, const Vec3 &on_plane, const Vec3 &normal);

    struct LineDistance
    {
        double distance; // perpendicular distance to the supporting line [m]
        double along;    // signed coordinate of the foot point along the ray [m]
    };
    LineDistance point_to_ray_distance(const Vec3 &p, const Ray &ray);

    // Angle between two unit vectors, atan2 form, in [0, pi].
    double angle_between(const Vec3 &u, const Vec3 &v);

    SpherePoint to_sphere_point(const Vec3 &dir);
    Vec3 from_sphere_point(const SpherePoint &p);

    struct PlanePoint
    {
        double x, y;
    };

    // x = azimuth * cos(pitch), y = pitch
    PlanePoint equal_area_project(const SpherePoint &p);

    // Rotate v about unit axis k by angle (Rodrigues).
    Vec3 rotate(const Vec3 &v, const Vec3 &k, double angle);

    // Rigid motion x -> R x + t, R stored row-major.
    struct RigidTransform
    {
        std::array<double, 9> rot{1, 0, 0, 0, 1, 0, 0, 0, 1};
        Vec3 shift;

        Vec3 apply_point(const Vec3 &p) const { return apply_direction(p) + shift; }
        Vec3 apply_direction(const Vec3 &d) const
        {
            return {rot[0] * d.x + rot[1] * d.y + rot[2] * d.z,
                    rot[3] * d.x + rot[4] * d.y + rot[5] * d.z,
                    rot[6] * d.x + rot[7] * d.y + rot[8] * d.z};
        }
        static RigidTransform from_axis_angle(const Vec3 &axis, double angle, const Vec3 &shift);
    };
}
