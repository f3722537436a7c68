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

#include "sbrt/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace sbrt
{
    std::complex<double> complex_permittivity(const Material &m, double frequency)
    {
        return {m.relative_permittivity, -m.conductivity / (2.0 * pi * frequency * vacuum_permittivity)};
    }

    std::complex<double> fresnel_perpendicular(double cos_incidence, const Material &m, double frequency)
    {
        if (std::isinf(m.conductivity))
            return -1.0;
        const double c = std::clamp(std::abs(cos_incidence), 0.0, 1.0);
        const std::complex<double> root = std::sqrt(complex_permittivity(m, frequency) - (1.0 - c * c));
        return (c - root) / (c + root);
    }

    double diffraction_coefficient(const Vec3 &a, const Vec3 &q, const Vec3 &b, double wavelength)
    {
        const double detour = std::max(0.0, distance(a, q) + distance(q, b) - distance(a, b));
        return 1.0 / (1.0 + std::sqrt(4.0 * detour / wavelength));
    }

    double path_power(const PropagationPath &path, const Scene &scene, double tx_power_dbm)
    {
        if (!(path.length > 0.0))
            throw std::invalid_argument("Path length must be positive.");
        const double lambda = scene.wavelength();
        double power = tx_power_dbm + 20.0 * std::log10(lambda / (4.0 * pi * path.length));

        std::vector<Vec3> pts{scene.tx};
        for (const auto &it : path.interactions)
            pts.push_back(it.point);
        pts.push_back(path.end_point);

        for (std::size_t k = 0; k < path.interactions.size(); ++k)
        {
            const auto &it = path.interactions[k];
            const Vec3 &prev = pts[k], &p = pts[k + 1], &next = pts[k + 2];
            double gain;
            if (it.kind == InteractionKind::reflection)
            {
                const auto &face = scene.faces[static_cast<std::size_t>(it.id)];
                const double c = dot(normalized(p - prev), face.normal);
                gain = std::abs(fresnel_perpendicular(c, scene.material_of(it.id), scene.frequency));
            }
            else
                gain = diffraction_coefficient(prev, p, next, lambda);
            power += 20.0 * std::log10(gain);
        }
        return power;
    }

    PathAngles angles(const PropagationPath &path)
    {
        return {to_sphere_point(path.launch_direction), to_sphere_point(-path.arrival_direction)};
    }

    double path_delay(const PropagationPath &path)
    {
        return path.length / speed_of_light;
    }

    PathMetrics path_metrics(const PropagationPath &path, const Scene &scene, double tx_power_dbm)
    {
        const auto a = angles(path);
        PathMetrics m;
        m.aod = a.aod;
        m.aoa = a.aoa;
        m.delay = path_delay(path);
        m.power = path_power(path, scene, tx_power_dbm);
        m.length = path.length;
        m.reflections = path.reflection_order();
        m.diffractions = path.diffraction_order();
        return m;
    }

    ChannelReport pdp(const std::vector<std::pair<PropagationPath, double>> &paths)
    {
        ChannelReport r;
        for (std::size_t i = 0; i < paths.size(); ++i)
        {
            const auto &[path, power] = paths[i];
            const auto a = angles(path);
            PathMetrics m;
            m.aod = a.aod;
            m.aoa = a.aoa;
            m.delay = path_delay(path);
            m.power = power;
            m.length = path.length;
            m.reflections = path.reflection_order();
            m.diffractions = path.diffraction_order();
            r.paths.push_back(m);
            r.pdp.push_back({m.delay, power, i});
        }
        std::stable_sort(r.pdp.begin(), r.pdp.end(), [](const PdpEntry &a, const PdpEntry &b)
                         { return a.delay < b.delay; });
        return r;
    }

    ChannelReport channel_report(const std::vector<PropagationPath> &paths, const Scene &scene, double tx_power_dbm)
    {
        std::vector<std::pair<PropagationPath, double>> in;
        in.reserve(paths.size());
        for (const auto &p : paths)
            in.emplace_back(p, path_power(p, scene, tx_power_dbm));
        return pdp(in);
    }
}
