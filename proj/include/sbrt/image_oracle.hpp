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

#include <vector>

namespace sbrt
{
    // Exact specular paths by mirror images for every face sequence of length
    // <= max_order (0..3). The LOS path is included when unobstructed.
    std::vector<ImagePath> im_reflections(const Scene &scene, int max_order);

    // Edge point minimizing |Tx - p| + |p - Rx| on each wedge. Minimizers at
    // or beyond the edge endpoints are rejected.
    std::vector<ImagePath> im_single_diffraction(const Scene &scene);

    // Reflections up to refl_order plus, when diff_order is 1, single diffraction.
    // Ordered like dedup_paths.
    std::vector<ImagePath> im_trace(const Scene &scene, int refl_order, int diff_order);

    // Parameter along the edge (from wedge.p0) of the shortest a -> edge -> b
    // connection on the infinite edge line.
    double fermat_edge_parameter(const Vec3 &a, const Vec3 &b, const Wedge &wedge);
}
