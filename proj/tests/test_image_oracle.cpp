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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sbrt/image_oracle.hpp"

#include <map>

using namespace sbrt;

namespace
{
    const Vec3 dims{5, 4, 3}, tx0{1, 1, 1.5}, rx0{4, 3, 1.5};

    Scene shoebox() { return make_shoebox(dims, concrete(), tx0, rx0, 2.4e9); }

    // Box wall as the axis it is normal to and its coordinate
    struct Wall
    {
        int axis;
        double value;
    };

    const std::array<Wall, 6> walls{{{0, 0.0}, {0, 5.0}, {1, 0.0}, {1, 4.0}, {2, 0.0}, {2, 3.0}}};

    double coord(const Vec3 &v, int axis) { return axis == 0 ? v.x : (axis == 1 ? v.y : v.z); }

    Vec3 with_coord(Vec3 v, int axis, double value)
    {
        (axis == 0 ? v.x : (axis == 1 ? v.y : v.z)) = value;
        return v;
    }

    Vec3 reflect_coord(const Vec3 &p, const Wall &w) { return with_coord(p, w.axis, 2 * w.value - coord(p, w.axis)); }

    int wall_of(const Scene &scene, int face)
    {
        const auto t = scene.triangle(face);
        for (std::size_t k = 0; k < walls.size(); ++k)
        {
            const auto &w = walls[k];
            if (std::abs(coord(t[0], w.axis) - w.value) < 1e-12 && std::abs(coord(t[1], w.axis) - w.value) < 1e-12 &&
                std::abs(coord(t[2], w.axis) - w.value) < 1e-12)
                return int(k);
        }
        return -1;
    }

    std::string wall_key(const PropagationPath &p, const Scene &scene)
    {
        std::string key = "W";
        for (const auto &it : p.interactions)
            key += std::to_string(wall_of(scene, it.id));
        return key;
    }

    // Axis-aligned image method for a closed box: all wall sequences without
    // immediate repeats, points checked against the wall rectangles.
    std::map<std::string, double> box_oracle(const Vec3 &tx, const Vec3 &rx, int max_order)
    {
        std::map<std::string, double> out;
        out["W"] = distance(tx, rx);
        std::vector<std::vector<int>> seqs{{}};
        for (int order = 1; order <= max_order; ++order)
        {
            std::vector<std::vector<int>> next;
            for (const auto &s : seqs)
                for (int w = 0; w < 6; ++w)
                    if (s.empty() || s.back() != w)
                    {
                        auto t = s;
                        t.push_back(w);
                        next.push_back(t);
                    }
            seqs = next;
            for (const auto &s : seqs)
            {
                std::vector<Vec3> images{tx};
                for (int w : s)
                    images.push_back(reflect_coord(images.back(), walls[std::size_t(w)]));
                Vec3 target = rx;
                bool ok = true;
                for (int k = int(s.size()) - 1; k >= 0 && ok; --k)
                {
                    const auto &w = walls[std::size_t(s[std::size_t(k)])];
                    const Vec3 &img = images[std::size_t(k) + 1];
                    const double a = coord(img, w.axis) - w.value, b = coord(target, w.axis) - w.value;
                    if (!(a * b < 0.0))
                    {
                        ok = false;
                        break;
                    }
                    const Vec3 q = img + (a / (a - b)) * (target - img);
                    for (int ax = 0; ax < 3; ++ax)
                        if (ax != w.axis && (coord(q, ax) <= 0.0 || coord(q, ax) >= coord(dims, ax)))
                            ok = false;
                    target = q;
                }
                if (!ok)
                    continue;
                std::string key = "W";
                for (int w : s)
                    key += std::to_string(w);
                out[key] = distance(images.back(), rx);
            }
        }
        return out;
    }

    double angle(const Vec3 &a, const Vec3 &b) { return std::atan2(norm(cross(a, b)), dot(a, b)); }

    double golden_minimum(const std::function<double(double)> &f, double lo, double hi)
    {
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = lo, b = hi;
        for (int k = 0; k < 200; ++k)
        {
            const double c = b - g * (b - a), d = a + g * (b - a);
            if (f(c) < f(d))
                b = d;
            else
                a = c;
        }
        return 0.5 * (a + b);
    }
}

TEST_CASE("order 1 in the shoebox: LOS and six walls at the mirror distances")
{
    const auto scene = shoebox();
    const auto paths = im_reflections(scene, 1);
    REQUIRE(paths.size() == 7);
    std::map<std::string, double> got;
    for (const auto &p : paths)
        got[wall_key(p, scene)] = p.length;
    const std::map<std::string, double> want{{"W", std::sqrt(13.0)},  {"W0", std::sqrt(29.0)}, {"W1", std::sqrt(29.0)},
                                             {"W2", 5.0},              {"W3", 5.0},             {"W4", std::sqrt(22.0)},
                                             {"W5", std::sqrt(22.0)}};
    REQUIRE(got.size() == want.size());
    for (const auto &[k, len] : want)
        CHECK(got.at(k) == doctest::Approx(len).epsilon(1e-12));
    // floor bounce: horizontal offset and the sum of both heights
    CHECK(got.at("W4") == doctest::Approx(std::sqrt(9.0 + 4.0 + (1.5 + 1.5) * (1.5 + 1.5))).epsilon(1e-12));
}

TEST_CASE("Rx on the wall normal through Tx gives a perpendicular bounce")
{
    const auto scene = make_shoebox(dims, concrete(), tx0, {1, 1, 2.5}, 2.4e9);
    bool found = false;
    for (const auto &p : im_reflections(scene, 1))
        if (wall_key(p, scene) == "W4")
        {
            found = true;
            CHECK(p.length == doctest::Approx(1.5 + 2.5).epsilon(1e-12));
            CHECK(distance(p.launch_direction, {0, 0, -1}) < 1e-12);
            CHECK(distance(p.arrival_direction, {0, 0, 1}) < 1e-12);
            CHECK(distance(p.interactions[0].point, {1, 1, 0}) < 1e-12);
        }
    CHECK(found);
}

TEST_CASE("orders 2 and 3 agree with the axis-aligned image oracle")
{
    for (const auto &[tx, rx] : {std::pair{tx0, rx0}, std::pair{Vec3{0.7, 3.1, 2.2}, Vec3{4.6, 0.4, 0.9}}})
    {
        const auto scene = make_shoebox(dims, concrete(), tx, rx, 2.4e9);
        for (int order : {2, 3})
        {
            const auto want = box_oracle(tx, rx, order);
            const auto paths = im_reflections(scene, order);
            std::map<std::string, double> got;
            for (const auto &p : paths)
                got[wall_key(p, scene)] = p.length;
            CHECK(paths.size() == want.size());
            CHECK(got.size() == want.size());
            for (const auto &[k, len] : want)
            {
                INFO(k);
                REQUIRE(got.count(k) == 1);
                CHECK(got.at(k) == doctest::Approx(len).epsilon(1e-12));
            }
        }
    }
    CHECK(box_oracle(tx0, rx0, 2).size() == 25);
}

TEST_CASE("specular law and validity of every image path")
{
    const auto scene = make_shoebox(dims, concrete(), tx0, rx0, 2.4e9, 2);
    const auto paths = im_reflections(scene, 3);
    REQUIRE(paths.size() > 25);
    for (const auto &p : paths)
    {
        CHECK(validate_path(p, scene));
        CHECK(p.error_angle == 0.0);
        CHECK(p.miss_distance == 0.0);
        const auto pts = path_polyline(p, scene);
        double len = 0.0;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k)
            len += distance(pts[k], pts[k + 1]);
        CHECK(p.length == doctest::Approx(len).epsilon(1e-12));
        for (std::size_t k = 0; k < p.interactions.size(); ++k)
        {
            const Vec3 n = scene.faces[p.interactions[k].id].normal;
            const Vec3 in = normalized(pts[k + 1] - pts[k]), out = normalized(pts[k + 2] - pts[k + 1]);
            CHECK(std::abs(angle(-in, n) - angle(out, n)) < 1e-10);
            CHECK(std::abs(dot(cross(in, out), n)) < 1e-10);
        }
    }
    CHECK_THROWS_AS(im_reflections(scene, 4), std::invalid_argument);
    CHECK_THROWS_AS(im_reflections(scene, -1), std::invalid_argument);
}

TEST_CASE("symmetric corner diffraction")
{
    const auto scene = make_corner(10, 10, 20, concrete(), {-6, 8, 4}, {8, -6, 8}, 2.4e9);
    REQUIRE(scene.wedges.size() == 1);
    const auto paths = im_single_diffraction(scene);
    REQUIRE(paths.size() == 1);
    const auto &p = paths[0];
    CHECK(distance(p.interactions[0].point, {0, 0, 6}) < 1e-9);
    CHECK(p.length == doctest::Approx(2.0 * std::sqrt(100.0 + 4.0)).epsilon(1e-12));
    CHECK(validate_path(p, scene));
}

TEST_CASE("Fermat edge point satisfies the Keller condition and matches a golden-section search")
{
    const auto scene = make_corner(10, 10, 20, concrete(), {-6, 8, 4}, {12, -5, 2}, 2.4e9);
    const auto &w = scene.wedges[0];
    const Vec3 e = w.direction();
    for (const auto &[a, b] : {std::pair{scene.tx, scene.rx}, std::pair{Vec3{-3, 1, 17}, Vec3{2, -9, 1}},
                               std::pair{Vec3{-8, 2, 3}, Vec3{5, -1, 30}}})
    {
        const double s = fermat_edge_parameter(a, b, w);
        const auto f = [&](double t) { return distance(a, w.p0 + t * e) + distance(w.p0 + t * e, b); };
        CHECK(s == doctest::Approx(golden_minimum(f, -100.0, 100.0)).epsilon(1e-6));
        const Vec3 q = w.p0 + s * e;
        CHECK(std::abs(angle(normalized(q - a), e) - angle(normalized(b - q), e)) < 1e-10);
    }

    const auto paths = im_single_diffraction(scene);
    REQUIRE(paths.size() == 1);
    const Vec3 q = paths[0].interactions[0].point;
    CHECK(std::abs(angle(normalized(q - scene.tx), e) - angle(normalized(scene.rx - q), e)) < 1e-10);
    CHECK(q.z == doctest::Approx(3.130435).epsilon(1e-6));
    CHECK(paths[0].length == doctest::Approx(23.086792761).epsilon(1e-9));
}

TEST_CASE("edge minimizers outside the segment are rejected")
{
    // both ends far above the 20 m edge
    const auto high = make_corner(10, 10, 20, concrete(), {-6, 8, 30}, {8, -6, 40}, 2.4e9);
    CHECK(fermat_edge_parameter(high.tx, high.rx, high.wedges[0]) > 20.0);
    CHECK(im_single_diffraction(high).empty());
    const auto low = make_corner(10, 10, 20, concrete(), {-6, 8, -5}, {8, -6, -9}, 2.4e9);
    CHECK(im_single_diffraction(low).empty());
}

TEST_CASE("image paths are reproducible under rigid motion")
{
    const auto scene = make_shoebox(dims, concrete(), tx0, rx0, 2.4e9);
    const auto corner = make_corner(10, 10, 20, concrete(), {-6, 8, 4}, {12, -5, 2}, 2.4e9);
    const auto tf = RigidTransform::from_axis_angle({1, 2, 3}, 0.7, {-4, 5, 2});
    for (const auto *s : {&scene, &corner})
    {
        const auto a = im_trace(*s, 3, 1);
        const auto moved = transformed(*s, tf);
        const auto b = im_trace(moved, 3, 1);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k)
        {
            CHECK(sequence_key(a[k]) == sequence_key(b[k]));
            CHECK(std::abs(a[k].length - b[k].length) < 1e-9);
            CHECK(distance(tf.apply_direction(a[k].launch_direction), b[k].launch_direction) < 1e-9);
            CHECK(distance(tf.apply_direction(a[k].arrival_direction), b[k].arrival_direction) < 1e-9);
            for (std::size_t i = 0; i < a[k].interactions.size(); ++i)
                CHECK(distance(tf.apply_point(a[k].interactions[i].point), b[k].interactions[i].point) < 1e-9);
        }
    }
}

TEST_CASE("im_trace combines reflections and diffraction")
{
    const auto corner = make_corner(10, 10, 20, concrete(), {-6, 8, 4}, {12, -5, 2}, 2.4e9);
    const auto refl = im_reflections(corner, 2);
    const auto diff = im_single_diffraction(corner);
    CHECK(im_trace(corner, 2, 1).size() == refl.size() + diff.size());
    CHECK(im_trace(corner, 2, 0).size() == refl.size());
    CHECK_THROWS_AS(im_trace(corner, 2, 2), std::invalid_argument);
}
