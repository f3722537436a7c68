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

#include <string>
#include <vector>

namespace sbrt
{
    // Central angle between adjacent icosahedron vertices, arccos(1/sqrt(5)) = 63.4349 deg
    inline const double icosahedron_edge_angle = std::acos(1.0 / std::sqrt(5.0));

    // Regular polyhedron with triangular faces, vertices on the unit sphere.
    // Faces are wound counter-clockwise seen from outside.
    struct Polyhedron
    {
        std::vector<Vec3> vertices;
        std::vector<std::array<int, 3>> faces;

        // Number of distinct undirected edges
        std::size_t edge_count() const;
        // Central angle subtended by one edge
        double edge_angle() const;
    };

    using Icosahedron = Polyhedron;

    // Canonical orientation: one vertex at +z, the upper ring at azimuths k * 72 deg.
    Icosahedron build_icosahedron();
    Polyhedron build_octahedron();
    Polyhedron build_tetrahedron();

    enum class LaunchScheme
    {
        equidistant,
        equiangular
    };

    std::string to_string(LaunchScheme scheme);
    LaunchScheme parse_launch_scheme(const std::string &name);

    struct LaunchGrid
    {
        std::vector<Vec3> directions;
        int n = 0;
        double cone_half_angle = 0.0; // edge angle / (sqrt(3) n)
        LaunchScheme scheme = LaunchScheme::equiangular;
    };

    // Edge points at equal chord intervals on each flat face, interior lattice by
    // connecting them, everything pushed out onto the unit sphere. Points on
    // shared edges and vertices are emitted once, so an icosahedron yields
    // 10 n^2 + 2 directions.
    LaunchGrid subdivide_equidistant(const Polyhedron &solid, int n);

    // Equal central angles along every edge, then inward layers: the corners of
    // each inner triangle are obtained from the outer layer by the parallelogram
    // rule at each corner, projected onto the sphere, and the inner triangle's
    // edges are again split into equal arcs. A layer with m segments per edge
    // holds 3 m points; the innermost one is a single face-center point when
    // n = 0 mod 3, three corners when n = 1 mod 3 and a six-point ring when
    // n = 2 mod 3.
    LaunchGrid subdivide_equiangular(const Polyhedron &solid, int n);

    LaunchGrid make_launch_grid(LaunchScheme scheme, int n);

    // Points of one layer of the equiangular construction for a single face, in
    // ring order starting at the first corner. Exposed for inspection.
    std::vector<std::vector<Vec3>> equiangular_face_layers(const Vec3 &a, const Vec3 &b, const Vec3 &c, int n);

    struct DensityStats
    {
        std::vector<PlanePoint> projected;
        std::vector<double> nearest_neighbor_angles; // rad
        double coefficient_of_variation = 0.0;
    };

    DensityStats density_stats(const LaunchGrid &grid);

    // Index of the grid direction closest to `dir` (brute force).
    std::size_t nearest_direction(const LaunchGrid &grid, const Vec3 &dir);
}
