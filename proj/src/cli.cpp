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

#include "sbrt/cli.hpp"
#include "sbrt/image_oracle.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "CLI11.hpp"

namespace sbrt
{
    namespace
    {
        using json = nlohmann::json;
        using Clock = std::chrono::steady_clock;

        double elapsed_ms(Clock::time_point since)
        {
            return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
        }

        json vec_json(const Vec3 &v)
        {
            return json::array({v.x, v.y, v.z});
        }

        Vec3 json_vec(const json &j)
        {
            return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
        }

        std::string hash_string(std::uint64_t h)
        {
            std::ostringstream s;
            s << std::hex << std::setw(16) << std::setfill('0') << h;
            return s.str();
        }

        std::ofstream open_output(const std::string &path)
        {
            std::ofstream f(path, std::ios::binary);
            if (!f)
                throw std::runtime_error("cannot write '" + path + "'.");
            return f;
        }

        json sphere_json(const SpherePoint &p)
        {
            return {{"azimuth_deg", p.azimuth / deg}, {"elevation_deg", p.pitch / deg}};
        }

        void write_json(const json &j, const std::string &path)
        {
            auto f = open_output(path);
            f << j.dump(2) << '\n';
        }

        // ---------- Scene selection shared by all tracing commands ----------

        struct SceneOptions
        {
            std::string scene_file;
            std::string gen = "shoebox";
            std::vector<double> dims{5.0, 4.0, 3.0};
            int subdivisions = 1;
            std::vector<double> tx, rx;
            double frequency = 2.4e9;
            std::string save_path;

            void add_to(CLI::App *cmd)
            {
                cmd->add_option("--scene", scene_file, "Scene JSON file");
                cmd->add_option("--gen", gen, "Built-in scene when --scene is not given")
                    ->check(CLI::IsMember({"shoebox", "corner", "blocks"}));
                cmd->add_option("--dims", dims, "Shoebox size L W H [m]")->expected(3);
                cmd->add_option("--subdivisions", subdivisions, "Shoebox wall subdivisions")
                    ->check(CLI::PositiveNumber);
                cmd->add_option("--tx", tx, "Transmitter position [m]")->expected(3);
                cmd->add_option("--rx", rx, "Receiver position [m]")->expected(3);
                cmd->add_option("--frequency", frequency, "Carrier frequency of generated scenes [Hz]")
                    ->check(CLI::PositiveNumber);
                cmd->add_option("--save-scene", save_path, "Also write the scene as JSON");
            }

            json to_json() const
            {
                json j{{"gen", scene_file.empty() ? json(gen) : json(nullptr)},
                       {"scene", scene_file.empty() ? json(nullptr) : json(scene_file)},
                       {"frequency_hz", frequency}};
                if (scene_file.empty() && gen == "shoebox")
                {
                    j["dims"] = dims;
                    j["subdivisions"] = subdivisions;
                }
                if (!tx.empty())
                    j["tx"] = tx;
                if (!rx.empty())
                    j["rx"] = rx;
                return j;
            }

            Scene build() const
            {
                Scene scene;
                if (!scene_file.empty())
                    scene = load_scene(scene_file);
                else if (gen == "shoebox")
                {
                    const Vec3 t = tx.empty() ? Vec3{1.0, 1.0, 1.5} : Vec3{tx[0], tx[1], tx[2]};
                    const Vec3 r = rx.empty() ? Vec3{4.0, 3.0, 1.5} : Vec3{rx[0], rx[1], rx[2]};
                    scene = make_shoebox({dims[0], dims[1], dims[2]}, concrete(), t, r, frequency, subdivisions);
                }
                else if (gen == "corner")
                    scene = make_corner(10.0, 10.0, 20.0, concrete(), {-6.0, 8.0, 4.0}, {12.0, -5.0, 2.0}, frequency);
                else
                {
                    const std::vector<Block> blocks{{-20.0, 5.0, -5.0, 25.0, 15.0},
                                                    {5.0, -30.0, 25.0, -10.0, 20.0},
                                                    {10.0, 10.0, 20.0, 18.0, 9.0}};
                    scene = make_block_field(60.0, blocks, concrete(), concrete(), {-30.0, -20.0, 10.0},
                                             {35.0, 20.0, 1.5}, frequency);
                }

                if (!tx.empty() || !rx.empty())
                {
                    const Vec3 t = tx.empty() ? scene.tx : Vec3{tx[0], tx[1], tx[2]};
                    const Vec3 r = rx.empty() ? scene.rx : Vec3{rx[0], rx[1], rx[2]};
                    scene = with_endpoints(scene, t, r);
                }
                if (!save_path.empty())
                    save_scene(scene, save_path);
                return scene;
            }
        };

        struct TraceOptions
        {
            int n = 21;
            std::string scheme = "equiangular";
            int refl_order = 2;
            int diff_order = 0;
            int keller_samples = 72;
            double tx_power = 0.0;
            std::uint64_t seed = 0;

            void add_to(CLI::App *cmd)
            {
                cmd->add_option("--n", n, "Subdivisions per icosahedron edge")->check(CLI::PositiveNumber);
                cmd->add_option("--scheme", scheme, "Launch grid")
                    ->check(CLI::IsMember({"equiangular", "equidistant"}));
                cmd->add_option("--refl-order", refl_order, "Maximum reflection order")->check(CLI::NonNegativeNumber);
                cmd->add_option("--diff-order", diff_order, "Maximum diffraction order")->check(CLI::Range(0, 1));
                cmd->add_option("--keller-samples", keller_samples, "Diffracted rays per wedge capture")
                    ->check(CLI::PositiveNumber);
                cmd->add_option("--tx-power", tx_power, "Transmit power [dBm]");
                cmd->add_option("--seed", seed, "Recorded in the manifest; the pipeline has no randomness");
            }

            TraceConfig config() const
            {
                TraceConfig c;
                c.max_reflection_order = refl_order;
                c.max_diffraction_order = diff_order;
                c.n = n;
                c.scheme = parse_launch_scheme(scheme);
                c.keller_samples = keller_samples;
                return c;
            }

            json to_json() const
            {
                return {{"n", n},
                        {"scheme", scheme},
                        {"refl_order", refl_order},
                        {"diff_order", diff_order},
                        {"keller_samples", keller_samples},
                        {"tx_power_dbm", tx_power}};
            }
        };

        void write_history_csv(const std::vector<RefineResult> &results, const std::vector<PropagationPath> &traced,
                               const std::vector<ImagePath> &reference, const Scene &scene, double tx_power,
                               const std::string &path)
        {
            std::map<std::string, const ImagePath *> by_key;
            for (const auto &p : reference)
                by_key.emplace(sequence_key(p), &p);

            auto f = open_output(path);
            f << "path_id,i,error_deg,error_db,distance_err_m,power_err_db\n";
            for (std::size_t k = 0; k < results.size(); ++k)
            {
                PropagationPath canonical = results[k].path;
                relabel_coplanar(canonical, scene, std::max(1e-6, canonical.miss_distance));
                auto it = by_key.find(sequence_key(canonical));
                if (it == by_key.end())
                    it = by_key.find(sequence_key(traced[k]));
                const ImagePath *ref = it == by_key.end() ? nullptr : it->second;
                const auto &steps = results[k].trace.iterations;
                const double first = steps.front().error_angle;
                for (const auto &s : steps)
                {
                    f << k << ',' << s.iteration << ',' << format_number(s.error_angle / deg) << ',';
                    if (first > 0.0)
                        f << format_number(error_decibels(first, s.error_angle));
                    f << ',';
                    if (ref)
                        f << format_number(std::abs(s.length - ref->length));
                    f << ',';
                    if (ref && s.path)
                        f << format_number(std::abs(path_power(*s.path, scene, tx_power) - path_power(*ref, scene, tx_power)));
                    f << '\n';
                }
            }
        }

        void write_density_csv(const DensityStats &stats, const std::string &path)
        {
            auto f = open_output(path);
            f << "x,y,nearest_neighbor_angle_deg\n";
            for (std::size_t k = 0; k < stats.projected.size(); ++k)
                f << format_number(stats.projected[k].x) << ',' << format_number(stats.projected[k].y) << ','
                  << format_number(stats.nearest_neighbor_angles[k] / deg) << '\n';
        }

        Polyhedron solid_by_name(const std::string &name)
        {
            if (name == "icosahedron")
                return build_icosahedron();
            if (name == "octahedron")
                return build_octahedron();
            return build_tetrahedron();
        }
    }

    json RunManifest::to_json(bool with_timing) const
    {
        json j{{"tool", tool_name}, {"version", tool_version}, {"command", command}, {"seed", seed}, {"config", config}};
        if (with_timing)
        {
            json t = json::array();
            for (const auto &[stage, ms] : stage_ms)
                t.push_back({{"stage", stage}, {"wall_ms", ms}});
            j["stage_ms"] = t;
        }
        return j;
    }

    std::string manifest_path(const std::string &output)
    {
        return output + ".manifest.json";
    }

    void write_manifest(const RunManifest &m, const std::string &output)
    {
        write_json(m.to_json(true), manifest_path(output));
    }

    std::string format_number(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[64];
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    }

    json paths_to_json(const std::vector<PropagationPath> &paths, const Scene &scene, const std::string &method,
                       double tx_power_dbm, const RunManifest &manifest, const std::string &output)
    {
        json manifest_json = manifest.to_json(false);
        manifest_json["timing_file"] = std::filesystem::path(manifest_path(output)).filename().string();

        json list = json::array();
        for (std::size_t k = 0; k < paths.size(); ++k)
        {
            const auto &p = paths[k];
            const auto m = path_metrics(p, scene, tx_power_dbm);
            json its = json::array();
            for (const auto &it : p.interactions)
                its.push_back({{"kind", it.kind == InteractionKind::reflection ? "reflection" : "diffraction"},
                               {"id", it.id},
                               {"point", vec_json(it.point)}});
            json e{{"id", k},
                   {"sequence", sequence_key(p)},
                   {"refl_order", m.reflections},
                   {"diff_order", m.diffractions},
                   {"interactions", its},
                   {"length_m", p.length},
                   {"aod", sphere_json(m.aod)},
                   {"aoa", sphere_json(m.aoa)},
                   {"launch_direction", vec_json(p.launch_direction)},
                   {"arrival_direction", vec_json(p.arrival_direction)},
                   {"power_dbm", m.power},
                   {"delay_ns", m.delay * 1e9}};
            if (method != "im")
                e["error_angle_deg"] = p.error_angle / deg;
            list.push_back(std::move(e));
        }

        return {{"manifest", manifest_json},
                {"method", method},
                {"scene_hash", hash_string(scene_hash(scene))},
                {"frequency_hz", scene.frequency},
                {"tx", vec_json(scene.tx)},
                {"rx", vec_json(scene.rx)},
                {"paths", list}};
    }

    PathFile path_file_from_json(const json &j)
    {
        PathFile f;
        f.method = j.at("method").get<std::string>();
        f.scene_hash = j.at("scene_hash").get<std::string>();
        for (const auto &e : j.at("paths"))
        {
            StoredPath p;
            p.id = e.at("id").get<int>();
            p.sequence = e.at("sequence").get<std::string>();
            p.reflections = e.at("refl_order").get<int>();
            p.diffractions = e.at("diff_order").get<int>();
            p.launch_direction = json_vec(e.at("launch_direction"));
            p.arrival_direction = json_vec(e.at("arrival_direction"));
            p.length = e.at("length_m").get<double>();
            p.power = e.at("power_dbm").get<double>();
            p.delay = e.at("delay_ns").get<double>() * 1e-9;
            if (e.contains("error_angle_deg"))
                p.error_angle = e.at("error_angle_deg").get<double>() * deg;
            f.paths.push_back(p);
        }
        return f;
    }

    PathFile read_path_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open paths file '" + path + "'.");
        try
        {
            return path_file_from_json(json::parse(in));
        }
        catch (const json::exception &e)
        {
            throw std::runtime_error("invalid paths file '" + path + "': " + e.what());
        }
    }

    std::vector<CompareRow> compare_paths(const PathFile &sbr, const PathFile &im)
    {
        if (sbr.scene_hash != im.scene_hash)
            throw std::invalid_argument("scene hash mismatch: " + sbr.scene_hash + " vs " + im.scene_hash);

        std::map<std::string, const StoredPath *> a, b;
        for (const auto &p : sbr.paths)
            a.emplace(p.sequence, &p);
        for (const auto &p : im.paths)
            b.emplace(p.sequence, &p);

        std::vector<CompareRow> rows, unmatched;
        CompareRow mean{"mean", "", 0.0, 0.0, 0.0, 0.0}, max{"max", "", 0.0, 0.0, 0.0, 0.0};
        for (const auto &[key, p] : a)
        {
            const auto it = b.find(key);
            if (it == b.end())
            {
                unmatched.push_back({"sbr_only", key, {}, {}, {}, {}});
                continue;
            }
            const StoredPath *q = it->second;
            CompareRow r{"matched",
                         key,
                         angle_between(p->launch_direction, q->launch_direction) / deg,
                         angle_between(p->arrival_direction, q->arrival_direction) / deg,
                         std::abs(p->length - q->length),
                         std::abs(p->power - q->power)};
            for (auto field : {&CompareRow::d_aod_deg, &CompareRow::d_aoa_deg, &CompareRow::d_length_m,
                               &CompareRow::d_power_db})
            {
                *(mean.*field) += *(r.*field);
                *(max.*field) = std::max(*(max.*field), *(r.*field));
            }
            rows.push_back(r);
        }
        for (const auto &[key, q] : b)
            if (!a.count(key))
                unmatched.push_back({"im_only", key, {}, {}, {}, {}});

        if (rows.empty())
        {
            mean = {"mean", "", {}, {}, {}, {}};
            max = {"max", "", {}, {}, {}, {}};
        }
        else
            for (auto field : {&CompareRow::d_aod_deg, &CompareRow::d_aoa_deg, &CompareRow::d_length_m,
                               &CompareRow::d_power_db})
                *(mean.*field) /= static_cast<double>(rows.size());

        rows.insert(rows.end(), unmatched.begin(), unmatched.end());
        rows.push_back(mean);
        rows.push_back(max);
        return rows;
    }

    void write_compare_csv(const std::vector<CompareRow> &rows, const std::string &path)
    {
        auto f = open_output(path);
        f << "row_type,sequence,d_aod_deg,d_aoa_deg,d_length_m,d_power_db\n";
        for (const auto &r : rows)
        {
            f << r.row_type << ',' << r.sequence;
            for (const auto &v : {r.d_aod_deg, r.d_aoa_deg, r.d_length_m, r.d_power_db})
            {
                f << ',';
                if (v)
                    f << format_number(*v);
            }
            f << '\n';
        }
    }

    void write_pdp_csv(const std::vector<std::pair<std::string, ChannelReport>> &reports, const std::string &path)
    {
        auto f = open_output(path);
        f << "delay_ns,power_dbm,method,path_id,refl_order,diff_order\n";
        for (const auto &[method, report] : reports)
            for (const auto &e : report.pdp)
            {
                const auto &m = report.paths[e.path];
                f << format_number(e.delay * 1e9) << ',' << format_number(e.power) << ',' << method << ','
                  << e.path << ',' << m.reflections << ',' << m.diffractions << '\n';
            }
    }

    int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Shooting-and-bouncing ray tracer with iterative cone refinement", tool_name};
        app.set_version_flag("--version", tool_version);
        app.require_subcommand(1);

        SceneOptions scene_opt;
        TraceOptions trace_opt;
        std::string out_file = "paths.json", pdp_file, method = "sbr";

        auto *trace = app.add_subcommand("trace", "Trace paths with SBR or the image method");
        scene_opt.add_to(trace);
        trace_opt.add_to(trace);
        trace->add_option("--method", method, "Tracer")->check(CLI::IsMember({"sbr", "im"}));
        trace->add_option("--out", out_file, "paths.json output");
        trace->add_option("--pdp", pdp_file, "pdp.csv output");

        int iterations = 10;
        double tolerance_deg = 0.01;
        std::string history_file;
        auto *refine = app.add_subcommand("refine", "Trace with SBR and refine every path");
        scene_opt.add_to(refine);
        trace_opt.add_to(refine);
        refine->add_option("--iterations", iterations, "Maximum refinement iterations")->check(CLI::PositiveNumber);
        refine->add_option("--tolerance-deg", tolerance_deg, "Stop once the error angle is at or below [deg]")
            ->check(CLI::NonNegativeNumber);
        refine->add_option("--history", history_file, "history.csv output");
        refine->add_option("--out", out_file, "paths.json output");
        refine->add_option("--pdp", pdp_file, "pdp.csv output (refined and image method)");

        std::string sbr_file, im_file, compare_file = "compare.csv";
        auto *compare = app.add_subcommand("compare", "Compare two paths.json files by interaction sequence");
        compare->add_option("--sbr", sbr_file, "SBR or refined paths.json")->required();
        compare->add_option("--im", im_file, "Image-method paths.json")->required();
        compare->add_option("--out", compare_file, "compare.csv output");

        std::string solid = "icosahedron", density_file = "density.csv";
        auto *density = app.add_subcommand("density-map", "Launch-grid density map");
        density->add_option("--n", trace_opt.n, "Subdivisions per edge")->check(CLI::PositiveNumber);
        density->add_option("--scheme", trace_opt.scheme, "Launch grid")
            ->check(CLI::IsMember({"equiangular", "equidistant"}));
        density->add_option("--solid", solid, "Base polyhedron")
            ->check(CLI::IsMember({"icosahedron", "octahedron", "tetrahedron"}));
        density->add_option("--out", density_file, "density.csv output");

        std::string bench_file = "bench.csv";
        auto *bench = app.add_subcommand("bench", "Wall-clock of the image method, SBR and refinement");
        scene_opt.add_to(bench);
        trace_opt.add_to(bench);
        bench->add_option("--iterations", iterations, "Refinement iterations")->check(CLI::PositiveNumber);
        bench->add_option("--out", bench_file, "bench.csv output");

        try
        {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::ParseError &e)
        {
            return app.exit(e, out, err);
        }

        RunManifest manifest;
        manifest.seed = trace_opt.seed;

        try
        {
            if (trace->parsed())
            {
                if (method == "im" && trace_opt.refl_order > 3)
                    throw std::invalid_argument("the image method supports reflection orders up to 3");
                const auto scene = scene_opt.build();
                manifest.command = "trace";
                manifest.config = {{"scene", scene_opt.to_json()}, {"trace", trace_opt.to_json()}, {"method", method}};

                const auto t0 = Clock::now();
                const auto paths = method == "sbr" ? trace_sbr(scene, trace_opt.config())
                                                   : im_trace(scene, trace_opt.refl_order, trace_opt.diff_order);
                manifest.stage_ms.emplace_back(method, elapsed_ms(t0));

                write_json(paths_to_json(paths, scene, method, trace_opt.tx_power, manifest, out_file), out_file);
                write_manifest(manifest, out_file);
                if (!pdp_file.empty())
                {
                    write_pdp_csv({{method, channel_report(paths, scene, trace_opt.tx_power)}}, pdp_file);
                    write_manifest(manifest, pdp_file);
                }
                out << paths.size() << " paths written to " << out_file << '\n';
            }
            else if (refine->parsed())
            {
                const auto scene = scene_opt.build();
                RefineConfig rc;
                rc.max_iterations = iterations;
                rc.angle_tolerance = tolerance_deg * deg;
                rc.keep_history = !history_file.empty();
                manifest.command = "refine";
                manifest.config = {{"scene", scene_opt.to_json()},
                                   {"trace", trace_opt.to_json()},
                                   {"refine", {{"iterations", iterations}, {"tolerance_deg", tolerance_deg}}}};

                auto t0 = Clock::now();
                const auto traced = trace_sbr(scene, trace_opt.config());
                manifest.stage_ms.emplace_back("sbr", elapsed_ms(t0));
                t0 = Clock::now();
                const auto results = refine_paths(traced, scene, rc);
                const auto refined = settle_paths(results, scene);
                manifest.stage_ms.emplace_back("refine", elapsed_ms(t0));

                write_json(paths_to_json(refined, scene, "refined", trace_opt.tx_power, manifest, out_file), out_file);
                write_manifest(manifest, out_file);

                if (!history_file.empty() || !pdp_file.empty())
                {
                    const auto reference = im_trace(scene, std::min(trace_opt.refl_order, 3), trace_opt.diff_order);
                    if (!history_file.empty())
                    {
                        write_history_csv(results, traced, reference, scene, trace_opt.tx_power, history_file);
                        write_manifest(manifest, history_file);
                    }
                    if (!pdp_file.empty())
                    {
                        write_pdp_csv({{"refined", channel_report(refined, scene, trace_opt.tx_power)},
                                       {"sbr", channel_report(traced, scene, trace_opt.tx_power)},
                                       {"im", channel_report(reference, scene, trace_opt.tx_power)}},
                                      pdp_file);
                        write_manifest(manifest, pdp_file);
                    }
                }
                out << refined.size() << " refined paths (" << traced.size() << " traced) written to " << out_file
                    << '\n';
            }
            else if (compare->parsed())
            {
                const auto rows = compare_paths(read_path_file(sbr_file), read_path_file(im_file));
                manifest.command = "compare";
                manifest.config = {{"sbr", sbr_file}, {"im", im_file}};
                write_compare_csv(rows, compare_file);
                write_manifest(manifest, compare_file);
                const auto &mean = rows[rows.size() - 2];
                out << "mean |dAOD| = " << (mean.d_aod_deg ? format_number(*mean.d_aod_deg) : "n/a") << " deg\n";
            }
            else if (density->parsed())
            {
                const auto scheme = parse_launch_scheme(trace_opt.scheme);
                if (solid != "icosahedron" && scheme != LaunchScheme::equidistant)
                    throw std::invalid_argument("only the equidistant scheme is available for the " + solid);
                manifest.command = "density-map";
                manifest.config = {{"n", trace_opt.n}, {"scheme", trace_opt.scheme}, {"solid", solid}};
                const auto shape = solid_by_name(solid);
                const auto grid = scheme == LaunchScheme::equiangular ? subdivide_equiangular(shape, trace_opt.n)
                                                                      : subdivide_equidistant(shape, trace_opt.n);
                const auto stats = density_stats(grid);
                write_density_csv(stats, density_file);
                write_manifest(manifest, density_file);
                out << grid.directions.size() << " directions, CV = " << format_number(stats.coefficient_of_variation)
                    << '\n';
            }
            else if (bench->parsed())
            {
                const auto scene = scene_opt.build();
                manifest.command = "bench";
                manifest.config = {{"scene", scene_opt.to_json()},
                                   {"trace", trace_opt.to_json()},
                                   {"iterations", iterations}};
                RefineConfig rc;
                rc.max_iterations = iterations;
                rc.angle_tolerance = 0.0;

                auto t0 = Clock::now();
                const auto im = im_trace(scene, std::min(trace_opt.refl_order, 3), trace_opt.diff_order);
                const double t_im = elapsed_ms(t0);
                t0 = Clock::now();
                const auto traced = trace_sbr(scene, trace_opt.config());
                const double t_sbr = elapsed_ms(t0);
                t0 = Clock::now();
                const auto results = refine_paths(traced, scene, rc);
                const double t_refine = elapsed_ms(t0);
                manifest.stage_ms = {{"im", t_im}, {"sbr", t_sbr}, {"refine", t_refine}};

                auto f = open_output(bench_file);
                f << "stage,faces,refl_order,diff_order,paths,wall_ms\n";
                const auto row = [&](const char *stage, std::size_t n, double ms)
                {
                    f << stage << ',' << scene.faces.size() << ',' << trace_opt.refl_order << ',' << trace_opt.diff_order
                      << ',' << n << ',' << format_number(ms) << '\n';
                };
                row("im", im.size(), t_im);
                row("sbr", traced.size(), t_sbr);
                row("refine", results.size(), t_refine);
                f.close();
                write_manifest(manifest, bench_file);
                out << "im " << t_im << " ms, sbr " << t_sbr << " ms, refine " << t_refine << " ms\n";
            }
        }
        catch (const std::exception &e)
        {
            err << "error: " << e.what() << '\n';
            return 1;
        }
        return 0;
    }
}
