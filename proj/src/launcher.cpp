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

#include "sbrt/launcher.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace sbrt
{
    namespace
    {
        // Point at fraction t of the great-circle arc from a to b (unit vectors)
        Vec3 slerp(const Vec3 &a, const Vec3 &b, double t)
        {
            const double omega = angle_between(a, b);
            const double s = std::sin(omega);
            return normalized((std::sin((1.0 - t) * omega) / s) * a + (std::sin(t * omega) / s) * b);
        }

        Vec3 chord_point(const Vec3 &a, const Vec3 &b, double t) { return normalized(a + t * (b - a)); }

        using EdgeSampler = std::function<Vec3(const Vec3 &, const Vec3 &, double)>;

        // Vertices, then the interior points of every undirected edge, then the
        // per-face interior produced by `interior`.
        LaunchGrid assemble(const Polyhedron &solid, int n, LaunchScheme scheme, const EdgeSampler &edge_point,
                            const std::function<void(const Vec3 &, const Vec3 &, const Vec3 &, std::vector<Vec3> &)> &interior)
        {
            if (n < 1)
                throw std::invalid_argument("Subdivision count must be at least 1.");

            LaunchGrid grid;
            grid.n = n;
            grid.scheme = scheme;
            grid.cone_half_angle = solid.edge_angle() / (std::sqrt(3.0) * n);
            grid.directions = solid.vertices;

            std::set<std::pair<int, int>> edges;
            for (const auto &f : solid.faces)
                for (int k = 0; k < 3; ++k)
                    edges.insert({std::min(f[k], f[(k + 1) % 3]), std::max(f[k], f[(k + 1) % 3])});
            for (const auto &[i, j] : edges)
                for (int k = 1; k < n; ++k)
                    grid.directions.push_back(edge_point(solid.vertices[i], solid.vertices[j], double(k) / n));

            for (const auto &f : solid.faces)
                interior(solid.vertices[f[0]], solid.vertices[f[1]], solid.vertices[f[2]], grid.directions);
            return grid;
        }

        std::vector<Vec3> ring(const Vec3 &a, const Vec3 &b, const Vec3 &c, int m)
        {
            std::vector<Vec3> pts;
            pts.reserve(3 * static_cast<std::size_t>(m));
            for (const auto &[p, q] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}})
                for (int k = 0; k < m; ++k)
                    pts.push_back(slerp(p, q, double(k) / m));
            return pts;
        }
    }

    std::size_t Polyhedron::edge_count() const
    {
        std::set<std::pair<int, int>> edges;
        for (const auto &f : faces)
            for (int k = 0; k < 3; ++k)
                edges.insert({std::min(f[k], f[(k + 1) % 3]), std::max(f[k], f[(k + 1) % 3])});
        return edges.size();
    }

    double Polyhedron::edge_angle() const
    {
        return angle_between(vertices[faces[0][0]], vertices[faces[0][1]]);
    }

    Icosahedron build_icosahedron()
    {
        Icosahedron ico;
        const double z = 1.0 / std::sqrt(5.0), r = 2.0 / std::sqrt(5.0);
        ico.vertices.push_back({0, 0, 1});
        for (int k = 0; k < 5; ++k)
            ico.vertices.push_back({r * std::cos(2 * pi * k / 5), r * std::sin(2 * pi * k / 5), z});
        for (int k = 0; k < 5; ++k)
            ico.vertices.push_back({r * std::cos(2 * pi * k / 5 + pi / 5), r * std::sin(2 * pi * k / 5 + pi / 5), -z});
        ico.vertices.push_back({0, 0, -1});

        for (int k = 0; k < 5; ++k)
        {
            const int u0 = 1 + k, u1 = 1 + (k + 1) % 5;
            const int l0 = 6 + k, l1 = 6 + (k + 1) % 5;
            ico.faces.push_back({0, u0, u1});
            ico.faces.push_back({u0, l0, u1});
            ico.faces.push_back({u1, l0, l1});
            ico.faces.push_back({11, l1, l0});
        }
        return ico;
    }

    Polyhedron build_octahedron()
    {
        Polyhedron oct;
        oct.vertices = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
        for (int k = 0; k < 4; ++k)
        {
            oct.faces.push_back({k, (k + 1) % 4, 4});
            oct.faces.push_back({(k + 1) % 4, k, 5});
        }
        return oct;
    }

    Polyhedron build_tetrahedron()
    {
        Polyhedron tet;
        const double s = 1.0 / std::sqrt(3.0);
        tet.vertices = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
        tet.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
        return tet;
    }

    std::string to_string(LaunchScheme scheme)
    {
        return scheme == LaunchScheme::equidistant ? "equidistant" : "equiangular";
    }

    LaunchScheme parse_launch_scheme(const std::string &name)
    {
        if (name == "equidistant")
            return LaunchScheme::equidistant;
        if (name == "equiangular")
            return LaunchScheme::equiangular;
        throw std::invalid_argument("Unknown launch scheme '" + name + "'.");
    }

    LaunchGrid subdivide_equidistant(const Polyhedron &solid, int n)
    {
        return assemble(solid, n, LaunchScheme::equidistant, chord_point,
                        [n](const Vec3 &a, const Vec3 &b, const Vec3 &c, std::vector<Vec3> &out)
                        {
                            for (int i = 1; i < n; ++i)
                                for (int j = 1; i + j < n; ++j)
                                    out.push_back(normalized(a + (double(i) / n) * (b - a) + (double(j) / n) * (c - a)));
                        });
    }

    std::vector<std::vector<Vec3>> equiangular_face_layers(const Vec3 &a, const Vec3 &b, const Vec3 &c, int n)
    {
        std::vector<std::vector<Vec3>> layers;
        Vec3 ca = a, cb = b, cc = c;
        int m = n;
        while (true)
        {
            if (m == 0)
            {
                layers.push_back({normalized(ca + cb + cc)});
                break;
            }
            auto pts = ring(ca, cb, cc, m);
            layers.push_back(pts);
            if (m < 3)
                break;

            // Parallelogram rule at each corner: the inner corner is the corner
            // plus its two neighbouring steps along the layer.
            const std::size_t last = pts.size() - 1;
            const std::size_t mm = static_cast<std::size_t>(m);
            ca = normalized(pts[0] + (pts[1] - pts[0]) + (pts[last] - pts[0]));
            cb = normalized(pts[mm] + (pts[mm + 1] - pts[mm]) + (pts[mm - 1] - pts[mm]));
            cc = normalized(pts[2 * mm] + (pts[2 * mm + 1] - pts[2 * mm]) + (pts[2 * mm - 1] - pts[2 * mm]));
            m -= 3;
        }
        return layers;
    }

    LaunchGrid subdivide_equiangular(const Polyhedron &solid, int n)
    {
        return assemble(solid, n, LaunchScheme::equiangular, slerp,
                        [n](const Vec3 &a, const Vec3 &b, const Vec3 &c, std::vector<Vec3> &out)
                        {
                            const auto layers = equiangular_face_layers(a, b, c, n);
                            // layer 0 lies on the shared edges and is emitted per edge
                            for (std::size_t l = 1; l < layers.size(); ++l)
                                out.insert(out.end(), layers[l].begin(), layers[l].end());
                        });
    }

    LaunchGrid make_launch_grid(LaunchScheme scheme, int n)
    {
        const auto ico = build_icosahedron();
        return scheme == LaunchScheme::equidistant ? subdivide_equidistant(ico, n) : subdivide_equiangular(ico, n);
    }

    DensityStats density_stats(const LaunchGrid &grid)
    {
        if (grid.directions.empty())
            throw std::invalid_argument("Density statistics need a non-empty grid.");

        DensityStats stats;
        const auto &d = grid.directions;
        const std::size_t count = d.size();
        stats.projected.reserve(count);
        for (const auto &v : d)
            stats.projected.push_back(equal_area_project(to_sphere_point(v)));

        stats.nearest_neighbor_angles.assign(count, pi);
        if (count > 1)
        {
            std::vector<std::size_t> best(count, 0);
            std::vector<double> best_dot(count, -2.0);
            for (std::size_t i = 0; i < count; ++i)
                for (std::size_t j = i + 1; j < count; ++j)
                {
                    const double c = dot(d[i], d[j]);
                    if (c > best_dot[i])
                        best_dot[i] = c, best[i] = j;
                    if (c > best_dot[j])
                        best_dot[j] = c, best[j] = i;
                }
            for (std::size_t i = 0; i < count; ++i)
                stats.nearest_neighbor_angles[i] = angle_between(d[i], d[best[i]]);
        }

        const auto &a = stats.nearest_neighbor_angles;
        const double mean = std::accumulate(a.begin(), a.end(), 0.0) / double(count);
        double var = 0.0;
        for (double x : a)
            var += (x - mean) * (x - mean);
        var /= double(count);
        stats.coefficient_of_variation = std::sqrt(var) / mean;
        return stats;
    }

    std::size_t nearest_direction(const LaunchGrid &grid, const Vec3 &dir)
    {
        std::size_t best = 0;
        double best_dot = -2.0;
        for (std::size_t i = 0; i < grid.directions.size(); ++i)
        {
            const double c = dot(grid.directions[i], dir);
            if (c > best_dot)
                best_dot = c, best = i;
        }
        return best;
    }
}
