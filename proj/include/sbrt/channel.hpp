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

#include "sbrt/tracer.hpp"

#include <complex>
#include <utility>
#include <vector>

namespace sbrt
{
    // eps_r - j sigma / (2 pi f eps0)
    std::complex<double> complex_permittivity(const Material &m, double frequency);

    // Perpendicular-polarization reflection coefficient; cos_incidence is measured
    // against the surface normal. Infinite conductivity gives -1.
    std::complex<double> fresnel_perpendicular(double cos_incidence, const Material &m, double frequency);

    // Scalar edge coefficient 1 / (1 + v), v = sqrt(4 detour / lambda), where the
    // detour is |a - q| + |q - b| - |a - b|.
    double diffraction_coefficient(const Vec3 &a, const Vec3 &q, const Vec3 &b, double wavelength);

    // Received power [dBm] with isotropic antennas
    double path_power(const PropagationPath &path, const Scene &scene, double tx_power_dbm = 0.0);

    struct PathAngles
    {
        SpherePoint aod; // departure direction at Tx
        SpherePoint aoa; // direction from Rx back along the arriving ray
    };
    PathAngles angles(const PropagationPath &path);

    double path_delay(const PropagationPath &path); // s

    struct PathMetrics
    {
        SpherePoint aod, aoa;
        double delay = 0.0; // s
        double power = 0.0; // dBm
        double length = 0.0; // m
        int reflections = 0, diffractions = 0;
    };

    PathMetrics path_metrics(const PropagationPath &path, const Scene &scene, double tx_power_dbm = 0.0);

    struct PdpEntry
    {
        double delay = 0.0; // s
        double power = 0.0; // dBm
        std::size_t path = 0; // index into the input sequence
    };

    struct ChannelReport
    {
        std::vector<PathMetrics> paths;
        std::vector<PdpEntry> pdp; // sorted by delay, ties by input index
    };

    ChannelReport pdp(const std::vector<std::pair<PropagationPath, double>> &paths);
    ChannelReport channel_report(const std::vector<PropagationPath> &paths, const Scene &scene,
                                 double tx_power_dbm = 0.0);
}
