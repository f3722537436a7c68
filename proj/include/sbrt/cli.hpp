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

#include "sbrt/channel.hpp"
#include "sbrt/refiner.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace sbrt
{
    inline constexpr const char *tool_name = "sbrt";
    inline constexpr const char *tool_version = "1.0.0";

    // Parameters, seed and version of a run. The deterministic part is embedded
    // in outputs; stage timings go to a "<output>.manifest.json" sidecar so that
    // identical runs produce identical primary files.
    struct RunManifest
    {
        std::string command;
        nlohmann::json config = nlohmann::json::object();
        std::uint64_t seed = 0;
        std::vector<std::pair<std::string, double>> stage_ms;

        nlohmann::json to_json(bool with_timing) const;
    };

    std::string manifest_path(const std::string &output);
    void write_manifest(const RunManifest &m, const std::string &output);

    // Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values
    std::string format_number(double v);

    // paths.json document
    nlohmann::json paths_to_json(const std::vector<PropagationPath> &paths, const Scene &scene,
                                 const std::string &method, double tx_power_dbm, const RunManifest &manifest,
                                 const std::string &output);

    struct StoredPath
    {
        int id = 0;
        std::string sequence;
        int reflections = 0, diffractions = 0;
        Vec3 launch_direction, arrival_direction;
        double length = 0.0;   // m
        double power = 0.0;    // dBm
        double delay = 0.0;    // s
        std::optional<double> error_angle; // rad, SBR only
    };

    struct PathFile
    {
        std::string method;
        std::string scene_hash;
        std::vector<StoredPath> paths;
    };

    PathFile path_file_from_json(const nlohmann::json &j);
    PathFile read_path_file(const std::string &path);

    // One compare.csv row; deltas are absolute differences
    struct CompareRow
    {
        std::string row_type; // matched, sbr_only, im_only, mean, max
        std::string sequence;
        std::optional<double> d_aod_deg, d_aoa_deg, d_length_m, d_power_db;
    };

    // Matches paths by interaction sequence. Throws std::invalid_argument when the
    // two files come from different scenes.
    std::vector<CompareRow> compare_paths(const PathFile &sbr, const PathFile &im);

    void write_compare_csv(const std::vector<CompareRow> &rows, const std::string &path);
    // Rows of all reports, each tagged with its method name
    void write_pdp_csv(const std::vector<std::pair<std::string, ChannelReport>> &reports, const std::string &path);

    // Runs the command line (arguments without the program name). Returns the
    // process exit code; messages go to out and err.
    int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);
}
