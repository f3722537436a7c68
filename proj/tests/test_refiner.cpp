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

#include "sbrt/channel.hpp"
#include "sbrt/image_oracle.hpp"
#include "sbrt/refiner.hpp"

#include <map>
#include <random>

using namespace sbrt;

namespace
{
    Scene shoebox() { return make_shoebox({5, 4, 3}, concrete(), {1, 1, 1.5}, {4, 3, 1.5}, 2.4e9); }

    std::map<std::string, PropagationPath> by_key(const std::vector<PropagationPath> &paths)
    {
        std::map<std::string, PropagationPath> out;
        for (const auto &p : paths)
            out.emplace(sequence_key(p), p);
        return out;
    }

    // Key after moving reflections onto the lowest-id coplanar face, as the image method labels them
    std::string wall_key(PropagationPath p, const Scene &scene)
    {
        relabel_coplanar(p, scene, std::max(1e-6, p.miss_distance));
        return sequence_key(p);
    }

    double atan2_angle(const Vec3 &a, const Vec3 &b) { return std::atan2(norm(cross(a, b)), dot(a, b)); }

    struct Refined
    {
        Scene scene;
        std::vector<PropagationPath> sbr;
        std::vector<RefineResult> results;
        std::map<std::string, PropagationPath> im;
        double launch_half_angle = 0.0;
    };

    // Order-2 shoebox paths refined with the full iteration budget
    const Refined &refined_shoebox()
    {
        static const Refined r = []
        {
            Refined out;
            out.scene = shoebox();
            TraceConfig tc;
            tc.max_reflection_order = 2;
            out.sbr = trace_sbr(out.scene, tc);
            RefineConfig rc;
            rc.max_iterations = 10;
            rc.angle_tolerance = 0.0;
            rc.keep_history = true;
            out.results = refine_paths(out.sbr, out.scene, rc);
            out.im = by_key(im_reflections(out.scene, 2));
            out.launch_half_angle = make_launch_grid(tc.scheme, tc.n).cone_half_angle;
            return out;
        }();
        return r;
    }

    double mean_error_db_slope(const std::vector<double> &before, const std::vector<double> &after)
    {
        double b = 0.0, a = 0.0;
        for (double x : before)
            b += x;
        for (double x : after)
            a += x;
        return error_decibels(b / double(before.size()), a / double(after.size()));
    }
}

TEST_CASE("sub_cones geometry")
{
    const RayCone parent{{1, 2, 3}, {0, 0, 1}, 1.0 * deg};
    const auto kids = sub_cones(parent);
    for (std::size_t k = 0; k < 6; ++k)
    {
        CHECK(kids[k].origin == parent.origin);
        CHECK(kids[k].half_angle == doctest::Approx(parent.half_angle / std::sqrt(3.0)).epsilon(1e-15));
        CHECK(atan2_angle(kids[k].axis, parent.axis) == doctest::Approx(parent.half_angle / std::sqrt(3.0)).epsilon(1e-12));
        CHECK(norm(kids[k].axis) == doctest::Approx(1.0).epsilon(1e-15));
        // neighbours 60 deg apart around the parent axis
        const Vec3 a = kids[k].axis - dot(kids[k].axis, parent.axis) * parent.axis;
        const Vec3 b = kids[(k + 1) % 6].axis - dot(kids[(k + 1) % 6].axis, parent.axis) * parent.axis;
        CHECK(atan2_angle(a, b) == doctest::Approx(pi / 3).epsilon(1e-9));
    }
    CHECK(std::abs(kids[0].axis.y) < 1e-15);
    CHECK(kids[0].axis.x > 0.0);
}

TEST_CASE("sub_cones cover the parent disk")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (const Vec3 axis : {Vec3{0, 0, 1}, normalized(Vec3{1, -2, 0.5})})
    {
        const RayCone parent{{0, 0, 0}, axis, 1.7439 * deg};
        const auto kids = sub_cones(parent);
        const Vec3 u = any_perpendicular(axis), v = cross(axis, u);
        int uncovered = 0;
        for (int k = 0; k < 100000; ++k)
        {
            // uniform over the spherical cap
            const double c = 1.0 - uni(rng) * (1.0 - std::cos(parent.half_angle));
            const double s = std::sqrt(1.0 - c * c), phi = 2 * pi * uni(rng);
            const Vec3 d = c * axis + s * (std::cos(phi) * u + std::sin(phi) * v);
            bool inside = false;
            for (const auto &kid : kids)
                inside = inside || atan2_angle(d, kid.axis) <= kid.half_angle + 1e-9;
            uncovered += inside ? 0 : 1;
        }
        CHECK(uncovered == 0);
    }
}

TEST_CASE("refined order-2 shoebox paths match the image method within 0.01 deg")
{
    const auto &r = refined_shoebox();
    REQUIRE(r.sbr.size() >= 20);
    int matched = 0;
    for (const auto &res : r.results)
    {
        const auto it = r.im.find(wall_key(res.path, r.scene));
        REQUIRE(it != r.im.end());
        ++matched;
        CHECK(atan2_angle(res.path.launch_direction, it->second.launch_direction) <= 0.01 * deg);
        CHECK(atan2_angle(res.path.arrival_direction, it->second.arrival_direction) <= 0.01 * deg);
    }
    CHECK(matched == int(r.sbr.size()));
}

TEST_CASE("per-iteration error bound and cone shrink")
{
    const auto &r = refined_shoebox();
    for (const auto &res : r.results)
        for (const auto &step : res.trace.iterations)
        {
            const double shrink = std::pow(3.0, step.iteration / 2.0);
            CHECK(step.cone.half_angle == doctest::Approx(r.launch_half_angle / shrink).epsilon(1e-12));
            CHECK(step.error_angle <= r.launch_half_angle / shrink);
            CHECK(step.error_angle <= 63.4349 * deg / (std::pow(3.0, (step.iteration + 1) / 2.0) * 21) * (1 + 1e-6));
        }

    const auto corner = make_corner(10, 10, 20, concrete(), {-6, 8, 4}, {12, -5, 2}, 2.4e9);
    TraceConfig tc;
    tc.max_reflection_order = 0;
    tc.max_diffraction_order = 1;
    const auto paths = trace_sbr(corner, tc);
    REQUIRE(paths.size() == 1);
    RefineConfig rc;
    rc.angle_tolerance = 0.0;
    const auto res = refine_path(paths[0], corner, rc);
    CHECK(res.trace.terminated_by == Termination::max_iterations);
    for (const auto &step : res.trace.iterations)
        CHECK(step.error_angle <= paths[0].source_cone.half_angle / std::pow(3.0, step.iteration / 2.0));
}

TEST_CASE("ten iterations reduce the mean error angle by at least 23 dB")
{
    const auto &r = refined_shoebox();
    std::vector<double> first, last;
    for (const auto &res : r.results)
    {
        REQUIRE(res.trace.iterations.size() == 11);
        first.push_back(res.trace.iterations.front().error_angle);
        last.push_back(res.trace.iterations.back().error_angle);
    }
    const double db = mean_error_db_slope(first, last);
    MESSAGE("mean error reduction " << db << " dB");
    CHECK(db >= 23.0);
}

TEST_CASE("refinement keeps the sequence, bounds the work and never ends worse")
{
    const auto &r = refined_shoebox();
    for (std::size_t k = 0; k < r.results.size(); ++k)
    {
        const auto &res = r.results[k];
        CHECK(sequence_key(res.path) == sequence_key(r.sbr[k]));
        CHECK(res.path.error_angle <= r.sbr[k].error_angle);
        double best = res.trace.iterations.front().error_angle;
        for (const auto &step : res.trace.iterations)
            best = std::min(best, step.error_angle);
        CHECK(res.path.error_angle == best);
        for (const auto &step : res.trace.iterations)
        {
            CHECK(step.candidates <= 6 * (1 + diffraction_fan_size));
            REQUIRE(step.path.has_value());
            CHECK(sequence_key(*step.path) == sequence_key(r.sbr[k]));
        }
        CHECK(res.trace.terminated_by != Termination::lost_path);
    }
}

TEST_CASE("exact paths are left alone")
{
    const auto scene = shoebox();
    const auto grid = make_launch_grid(LaunchScheme::equiangular, 21);
    for (auto p : im_reflections(scene, 2))
    {
        p.source_cone = RayCone{scene.tx, p.launch_direction, grid.cone_half_angle};
        RefineConfig rc;
        rc.max_iterations = 7;
        const auto res = refine_path(p, scene, rc);
        CHECK(res.trace.terminated_by == Termination::tolerance);
        CHECK(res.trace.iterations.size() == 1);
        CHECK(res.path.length == p.length);
        CHECK(res.path.launch_direction == p.launch_direction);
        CHECK(res.path.error_angle == 0.0);
        CHECK(res.valid);
    }
}

TEST_CASE("a sequence the cone cannot reproduce is reported lost")
{
    const auto scene = shoebox();
    PropagationPath p;
    // a floor bounce recorded for a cone that points at the ceiling
    p.interactions.push_back({InteractionKind::reflection, 0, {2, 2, 0}, {0, 0, 1}});
    p.source_cone = RayCone{scene.tx, {0, 0, 1}, 1.0 * deg};
    p.launch_direction = {0, 0, 1};
    p.error_angle = 0.5 * deg;
    const auto res = refine_path(p, scene, RefineConfig{});
    CHECK(res.trace.terminated_by == Termination::lost_path);
    CHECK(res.path.error_angle == p.error_angle);
    CHECK(res.path.interactions[0].point == p.interactions[0].point);
    CHECK(settle_paths({res}, scene).empty());
    CHECK_THROWS_AS(refine_path(p, scene, RefineConfig{0}), std::invalid_argument);
}

TEST_CASE("error_decibels examples")
{
    CHECK(error_decibels(0.3, 0.3) == 0.0);
    CHECK(error_decibels(243.0, 1.0) == doctest::Approx(23.8561).epsilon(1e-5));
    CHECK(error_decibels(10.0, 1.0) == doctest::Approx(10.0));
    CHECK(std::isinf(error_decibels(1.0, 0.0)));
    CHECK_THROWS_AS(error_decibels(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(error_decibels(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("termination names")
{
    CHECK(to_string(Termination::tolerance) == "tolerance");
    CHECK(to_string(Termination::max_iterations) == "max_iterations");
    CHECK(to_string(Termination::lost_path) == "lost_path");
}

TEST_CASE("power error decays at the error-angle slope")
{
    const auto &r = refined_shoebox();
    std::vector<double> theta0, theta10, power0, power10;
    for (const auto &res : r.results)
    {
        const auto &im = r.im.at(wall_key(res.path, r.scene));
        const double p_im = path_power(im, r.scene);
        const auto &s0 = res.trace.iterations.front();
        const auto &s10 = res.trace.iterations.back();
        theta0.push_back(s0.error_angle);
        theta10.push_back(s10.error_angle);
        power0.push_back(std::abs(path_power(*s0.path, r.scene) - p_im));
        power10.push_back(std::abs(path_power(*s10.path, r.scene) - p_im));
    }
    const double theta_db = mean_error_db_slope(theta0, theta10);
    const double power_db = mean_error_db_slope(power0, power10);
    MESSAGE("error angle " << theta_db << " dB, power error " << power_db << " dB per 10 iterations");
    CHECK(std::abs(power_db - theta_db) <= 3.0);
}

TEST_CASE("distance error decays at the error-angle slope")
{
    const auto &r = refined_shoebox();
    std::vector<double> theta0, theta10, dist0, dist10;
    for (const auto &res : r.results)
    {
        const auto &im = r.im.at(wall_key(res.path, r.scene));
        const auto &s0 = res.trace.iterations.front();
        const auto &s10 = res.trace.iterations.back();
        theta0.push_back(s0.error_angle);
        theta10.push_back(s10.error_angle);
        dist0.push_back(std::abs(s0.length - im.length));
        dist10.push_back(std::abs(s10.length - im.length));
    }
    const double theta_db = mean_error_db_slope(theta0, theta10);
    const double dist_db = mean_error_db_slope(dist0, dist10);
    MESSAGE("error angle " << theta_db << " dB, distance error " << dist_db << " dB per 10 iterations");
    CHECK(std::abs(dist_db - theta_db) <= 3.0);
}

TEST_CASE("settle_paths returns the image-method set on the shoebox")
{
    const auto &r = refined_shoebox();
    const auto settled = settle_paths(r.results, r.scene);
    CHECK(settled.size() == r.results.size());
    for (const auto &p : settled)
        CHECK(r.im.count(sequence_key(p)) == 1);
}
