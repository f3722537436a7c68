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

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sbrt
{
    // Six cones of half-angle h / sqrt(3) whose axes sit h / sqrt(3) away from the
    // parent axis at azimuths 0, 60, ..., 300 deg. Together they cover the parent
    // cone: the parent axis and the six points where neighbouring children meet
    // on the parent rim lie exactly on child boundaries.
    //
    // Azimuth 0 points along any_perpendicular(parent axis), which is +x for a
    // parent along +z.
    std::array<RayCone, 6> sub_cones(const RayCone &cone);

    enum class Termination
    {
        tolerance,
        max_iterations,
        lost_path
    };

    std::string to_string(Termination t);

    struct RefinementStep
    {
        int iteration = 0;       // 0 is the path as found by the tracer
        RayCone cone{};          // cone the chosen path was launched from
        double error_angle = 0.0; // rad
        double length = 0.0;      // m
        int candidates = 0;       // sub-rays evaluated in this iteration
        std::optional<PropagationPath> path; // kept when RefineConfig::keep_history
    };

    struct RefinementTrace
    {
        std::vector<RefinementStep> iterations;
        Termination terminated_by = Termination::max_iterations;
    };

    struct RefineConfig
    {
        int max_iterations = 10;
        double angle_tolerance = 0.01 * deg; // rad; stop once the error angle is at or below it
        bool keep_history = false;
    };

    struct RefineResult
    {
        PropagationPath path;  // smallest-error path seen over all iterations
        RefinementTrace trace;
        bool valid = false;    // collision validity of the returned path
    };

    // Added to the sub-cone half-angle in the reception test so that paths already
    // at double-precision resolution are not reported lost [rad]
    constexpr double reception_slack = 1e-13;

    // Number of Keller-cone directions tried per sub-ray at a diffraction
    constexpr int diffraction_fan_size = 5;

    // A candidate only counts when Rx lies inside its sub-cone. If no sub-cone of
    // an iteration receives Rx the refinement stops with lost_path and the input
    // path is returned unchanged.
    //
    // Re-launches the path's interaction sequence from each candidate axis.
    // Reflections mirror on the face planes, diffractions emit a fan around the
    // recorded Keller-cone direction with angular offsets 0, +-step/2, +-step.
    // Candidates whose geometry breaks down (ray leaving a plane, Rx behind the
    // last segment) are dropped.
    std::vector<PropagationPath> relaunch(const Scene &scene, const PropagationPath &reference, const RayCone &cone);

    RefineResult refine_path(const PropagationPath &path, const Scene &scene, const RefineConfig &cfg);

    std::vector<RefineResult> refine_paths(const std::vector<PropagationPath> &paths, const Scene &scene,
                                           const RefineConfig &cfg);

    // Final path set after refinement: lost paths dropped, reflections relabelled
    // onto the lowest-id coplanar face holding their point within the path's miss
    // distance, paths failing validation at that tolerance dropped, duplicates
    // removed.
    std::vector<PropagationPath> settle_paths(const std::vector<RefineResult> &results, const Scene &scene);

    // 10 log10(before / after); +inf when after is zero.
    double error_decibels(double before, double after);
}
