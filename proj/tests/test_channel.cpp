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

using namespace sbrt;

namespace
{
    const double c0 = 299792458.0;

    double free_space_dbm(double length, double frequency)
    {
        const double lambda = c0 / frequency;
        return 20.0 * std::log10(lambda / (4.0 * pi * length));
    }

    // Snell form: n1 cos(ti) - n2 cos(tt) over the sum, n1 = 1
    std::complex<double> fresnel_snell(double theta_i, double eps_r, double sigma, double f)
    {
        const std::complex<double> eps(eps_r, -sigma / (2.0 * pi * f * 8.8541878128e-12));
        const std::complex<double> n2 = std::sqrt(eps);
        const std::complex<double> sin_t = std::sin(theta_i) / n2;
        const std::complex<double> cos_t = std::sqrt(1.0 - sin_t * sin_t);
        return (std::cos(theta_i) - n2 * cos_t) / (std::cos(theta_i) + n2 * cos_t);
    }

    PropagationPath los_path(const Vec3 &tx, const Vec3 &rx)
    {
        PropagationPath p;
        p.launch_direction = normalized(rx - tx);
        p.arrival_direction = p.launch_direction;
        p.end_point = rx;
        p.length = distance(tx, rx);
        return p;
    }

    Scene open_space(const Vec3 &tx, const Vec3 &rx) { return build_scene({}, {}, {}, tx, rx, 2.4e9); }
}

TEST_CASE("free-space LOS power")
{
    const auto scene = open_space({0, 0, 0}, {1, 0, 0});
    CHECK(path_power(los_path(scene.tx, scene.rx), scene) == doctest::Approx(-40.05).epsilon(1e-4));
    CHECK(path_power(los_path(scene.tx, scene.rx), scene) == doctest::Approx(free_space_dbm(1.0, 2.4e9)).epsilon(1e-14));
    CHECK(path_power(los_path(scene.tx, scene.rx), scene, 20.0) == doctest::Approx(free_space_dbm(1.0, 2.4e9) + 20.0));

    double previous = 0.0;
    for (double d : {0.5, 1.0, 3.0, 10.0, 100.0})
    {
        const auto s = open_space({0, 0, 0}, {d, 0, 0});
        const double p = path_power(los_path(s.tx, s.rx), s);
        if (d > 0.5)
            CHECK(p < previous);
        previous = p;
    }
    PropagationPath zero;
    CHECK_THROWS_AS(path_power(zero, scene), std::invalid_argument);
}

TEST_CASE("perfect-conductor bounce equals LOS at the unfolded length")
{
    const auto scene = make_shoebox({5, 4, 3}, perfect_conductor(), {1, 1, 1.5}, {4, 3, 1.5}, 2.4e9);
    for (const auto &p : im_reflections(scene, 2))
        CHECK(path_power(p, scene) == doctest::Approx(free_space_dbm(p.length, 2.4e9)).epsilon(1e-12));
}

TEST_CASE("Fresnel coefficient against the Snell-law form")
{
    const auto m = concrete();
    for (double theta : {0.0, 10.0, 35.0, 60.0, 80.0, 89.0})
    {
        const auto got = fresnel_perpendicular(std::cos(theta * deg), m, 2.4e9);
        const auto want = fresnel_snell(theta * deg, m.relative_permittivity, m.conductivity, 2.4e9);
        CHECK(std::abs(got - want) < 1e-12);
        CHECK(std::abs(got) < 1.0);
    }
    // lossless dielectric at normal incidence
    const Material glass{"glass", 4.0, 0.0};
    CHECK(fresnel_perpendicular(1.0, glass, 1e9).real() == doctest::Approx(-1.0 / 3.0));
    CHECK(std::abs(fresnel_perpendicular(1.0, glass, 1e9).imag()) < 1e-15);
    // grazing incidence reflects fully
    CHECK(std::abs(fresnel_perpendicular(0.0, m, 2.4e9)) == doctest::Approx(1.0));
    CHECK(fresnel_perpendicular(0.3, perfect_conductor(), 2.4e9) == std::complex<double>(-1.0, 0.0));
    CHECK(complex_permittivity(m, 2.4e9).imag() == doctest::Approx(-m.conductivity / (2 * pi * 2.4e9 * 8.8541878128e-12)));
}

TEST_CASE("diffraction coefficient")
{
    const double lambda = c0 / 2.4e9;
    CHECK(diffraction_coefficient({0, 0, 0}, {1, 0, 0}, {2, 0, 0}, lambda) == doctest::Approx(1.0));
    const double detour = 2.0 * std::sqrt(2.0) - 2.0;
    CHECK(diffraction_coefficient({0, 0, 0}, {1, 1, 0}, {2, 0, 0}, lambda) ==
          doctest::Approx(1.0 / (1.0 + std::sqrt(4.0 * detour / lambda))));
    CHECK(diffraction_coefficient({0, 0, 0}, {1, 2, 0}, {2, 0, 0}, lambda) <
          diffraction_coefficient({0, 0, 0}, {1, 1, 0}, {2, 0, 0}, lambda));
}

TEST_CASE("angle conventions")
{
    const auto p = los_path({0, 0, 0}, {5, 0, 0});
    const auto a = angles(p);
    CHECK(a.aod.azimuth == 0.0);
    CHECK(a.aod.pitch == 0.0);
    CHECK(std::abs(a.aoa.azimuth) == doctest::Approx(pi));
    CHECK(a.aoa.pitch == doctest::Approx(0.0));

    const Vec3 tx{1, 2, 3}, rx{-2, 4, 7};
    const auto fwd = angles(los_path(tx, rx)), back = angles(los_path(rx, tx));
    CHECK(distance(from_sphere_point(fwd.aod), from_sphere_point(back.aoa)) < 1e-12);
    CHECK(distance(from_sphere_point(fwd.aoa), from_sphere_point(back.aod)) < 1e-12);
    CHECK(distance(from_sphere_point(fwd.aod), -from_sphere_point(fwd.aoa)) < 1e-12);
}

TEST_CASE("reciprocity on the shoebox")
{
    const Vec3 tx{1, 1, 1.5}, rx{4, 3, 1.5};
    const auto a = make_shoebox({5, 4, 3}, concrete(), tx, rx, 2.4e9);
    const auto b = make_shoebox({5, 4, 3}, concrete(), rx, tx, 2.4e9);
    std::map<std::vector<int>, PropagationPath> reversed;
    for (const auto &p : im_reflections(b, 2))
    {
        std::vector<int> seq;
        for (auto it = p.interactions.rbegin(); it != p.interactions.rend(); ++it)
            seq.push_back(it->id);
        reversed.emplace(seq, p);
    }
    const auto forward = im_reflections(a, 2);
    CHECK(forward.size() == reversed.size());
    for (const auto &p : forward)
    {
        std::vector<int> seq;
        for (const auto &it : p.interactions)
            seq.push_back(it.id);
        REQUIRE(reversed.count(seq) == 1);
        const auto &q = reversed.at(seq);
        CHECK(p.length == doctest::Approx(q.length).epsilon(1e-12));
        CHECK(path_power(p, a) == doctest::Approx(path_power(q, b)).epsilon(1e-12));
        const auto pa = angles(p), qa = angles(q);
        CHECK(distance(from_sphere_point(pa.aod), from_sphere_point(qa.aoa)) < 1e-12);
        CHECK(distance(from_sphere_point(pa.aoa), from_sphere_point(qa.aod)) < 1e-12);
    }
}

TEST_CASE("PDP ordering and delays")
{
    const auto one = pdp({{los_path({0, 0, 0}, {3, 0, 0}), -50.0}});
    REQUIRE(one.pdp.size() == 1);
    CHECK(one.pdp[0].delay * 1e9 == doctest::Approx(10.007).epsilon(1e-4));
    CHECK(one.pdp[0].delay == 3.0 / c0);
    CHECK(one.paths[0].delay == one.pdp[0].delay);
    CHECK(pdp({}).pdp.empty());

    const auto many = pdp({{los_path({0, 0, 0}, {9, 0, 0}), -1.0},
                           {los_path({0, 0, 0}, {2, 0, 0}), -2.0},
                           {los_path({0, 0, 0}, {0, 9, 0}), -3.0},
                           {los_path({0, 0, 0}, {4, 0, 0}), -4.0}});
    REQUIRE(many.pdp.size() == 4);
    CHECK(many.pdp[0].path == 1);
    CHECK(many.pdp[1].path == 3);
    CHECK(many.pdp[2].path == 0);
    CHECK(many.pdp[3].path == 2);
    CHECK(many.pdp[3].power == -3.0);

    const auto scene = make_shoebox({5, 4, 3}, concrete(), {1, 1, 1.5}, {4, 3, 1.5}, 2.4e9);
    const auto paths = im_reflections(scene, 2);
    const auto report = channel_report(paths, scene, 10.0);
    CHECK(report.pdp.size() == paths.size());
    for (std::size_t k = 0; k + 1 < report.pdp.size(); ++k)
        CHECK(report.pdp[k].delay <= report.pdp[k + 1].delay);
    for (std::size_t k = 0; k < paths.size(); ++k)
    {
        const auto m = path_metrics(paths[k], scene, 10.0);
        CHECK(report.paths[k].power == m.power);
        CHECK(m.delay == paths[k].length / c0);
        CHECK(m.reflections == paths[k].reflection_order());
    }
}

TEST_CASE("refined paths reproduce the image-method PDP")
{
    const auto scene = make_shoebox({5, 4, 3}, concrete(), {1, 1, 1.5}, {4, 3, 1.5}, 2.4e9);
    RefineConfig rc;
    rc.angle_tolerance = 0.0;
    const auto settled = settle_paths(refine_paths(trace_sbr(scene, TraceConfig{}), scene, rc), scene);
    std::map<std::string, PropagationPath> im;
    for (const auto &p : im_reflections(scene, 2))
        im.emplace(sequence_key(p), p);
    REQUIRE(!settled.empty());
    for (const auto &p : settled)
    {
        REQUIRE(im.count(sequence_key(p)) == 1);
        const auto &q = im.at(sequence_key(p));
        CHECK(std::abs(path_delay(p) - path_delay(q)) * 1e9 <= 1e-4);
        CHECK(std::abs(path_power(p, scene) - path_power(q, scene)) <= 0.01);
    }
}
