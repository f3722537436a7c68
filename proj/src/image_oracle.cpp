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

#include "sbrt/image_oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace sbrt
{
    namespace
    {
        constexpr double min_segment_length = 1e-9; // m

        // Fills directions, length and cone of an exact path from its points
        ImagePath finish_path(const Scene &scene, std::vector<Interaction> its)
        {
            ImagePath p;
            p.interactions = std::move(its);
            std::vector<Vec3> pts{scene.tx};
            for (const auto &it : p.interactions)
                pts.push_back(it.point);
            pts.push_back(scene.rx);

            for (std::size_t k = 0; k + 1 < pts.size(); ++k)
            {
                p.length += distance(pts[k], pts[k + 1]);
                if (k > 0)
                    p.interactions[k - 1].outgoing = normalized(pts[k + 1] - pts[k]);
            }
            p.launch_direction = normalized(pts[1] - pts[0]);
            p.arrival_direction = normalized(pts.back() - pts[pts.size() - 2]);
            p.end_point = scene.rx;
            p.source_cone = RayCone{scene.tx, p.launch_direction, 0.0};
            return p;
        }

        // A point on the seam between coplanar faces belongs to the lowest face id
        bool claimed_by_lower_face(const Scene &scene, const Face &face, const Vec3 &p)
        {
            const Vec3 &on_plane = scene.vertices[face.vertex_indices[0]];
            for (const auto &g : scene.faces)
            {
                if (g.id >= face.id)
                    break;
                if (dot(g.normal, face.normal) < 1.0 - 1e-12)
                    continue;
                if (std::abs(dot(scene.vertices[g.vertex_indices[0]] - on_plane, face.normal)) > 1e-9)
                    continue;
                if (point_on_face(scene, g.id, p))
                    return true;
            }
            return false;
        }

        class ImageSearch
        {
        public:
            ImageSearch(const Scene &scene, int max_order, std::vector<ImagePath> &out)
                : scene_(scene), max_order_(max_order), out_(out)
            {
            }

            void run()
            {
                images_.push_back(scene_.tx);
                descend();
            }

        private:
            void descend()
            {
                if (static_cast<int>(sequence_.size()) == max_order_)
                    return;
                const Vec3 source = images_.back();
                for (const auto &f : scene_.faces)
                {
                    if (!sequence_.empty() && sequence_.back() == f.id)
                        continue;
                    const Vec3 &on_plane = scene_.vertices[f.vertex_indices[0]];
                    // the (image) source has to see the front side
                    if (!(dot(source - on_plane, f.normal) > 0.0))
                        continue;
                    sequence_.push_back(f.id);
                    images_.push_back(mirror_point(source, on_plane, f.normal));
                    backtrack();
                    descend();
                    images_.pop_back();
                    sequence_.pop_back();
                }
            }

            // Connects Rx to the current image chain and checks the reflection points
            void backtrack()
            {
                const std::size_t m = sequence_.size();
                std::vector<Interaction> its(m);
                Vec3 target = scene_.rx;
                for (std::size_t k = m; k-- > 0;)
                {
                    const auto &f = scene_.faces[static_cast<std::size_t>(sequence_[k])];
                    const Vec3 &image = images_[k + 1];
                    const Vec3 &on_plane = scene_.vertices[f.vertex_indices[0]];
                    const double da = dot(image - on_plane, f.normal);
                    const double db = dot(target - on_plane, f.normal);
                    if (!(da < 0.0 && db > 0.0))
                        return;
                    const Vec3 p = image + (da / (da - db)) * (target - image);
                    // consecutive reflections at one point (a hit exactly on an edge) are degenerate
                    if (distance(p, target) < min_segment_length)
                        return;
                    if (!point_on_face(scene_, f.id, p) || claimed_by_lower_face(scene_, f, p))
                        return;
                    its[k] = Interaction{InteractionKind::reflection, f.id, p, {}};
                    target = p;
                }
                auto path = finish_path(scene_, std::move(its));
                if (validate_path(path, scene_))
                    out_.push_back(std::move(path));
            }

            const Scene &scene_;
            int max_order_;
            std::vector<ImagePath> &out_;
            std::vector<int> sequence_;
            std::vector<Vec3> images_;
        };

        void sort_paths(std::vector<ImagePath> &paths)
        {
            std::vector<std::pair<std::string, ImagePath>> keyed;
            keyed.reserve(paths.size());
            for (auto &p : paths)
                keyed.emplace_back(sequence_key(p), std::move(p));
            std::sort(keyed.begin(), keyed.end(), [](const auto &a, const auto &b)
                      {
                          const auto na = a.second.interactions.size(), nb = b.second.interactions.size();
                          return na != nb ? na < nb : a.first < b.first;
                      });
            paths.clear();
            for (auto &[key, p] : keyed)
                paths.push_back(std::move(p));
        }
    }

    std::vector<ImagePath> im_reflections(const Scene &scene, int max_order)
    {
        if (max_order < 0 || max_order > 3)
            throw std::invalid_argument("Image-method reflection order must be between 0 and 3.");

        std::vector<ImagePath> out;
        auto los = finish_path(scene, {});
        if (validate_path(los, scene))
            out.push_back(std::move(los));
        ImageSearch(scene, max_order, out).run();
        sort_paths(out);
        return out;
    }

    double fermat_edge_parameter(const Vec3 &a, const Vec3 &b, const Wedge &wedge)
    {
        const Vec3 e = wedge.direction();
        const double a1 = dot(a - wedge.p0, e), a2 = dot(b - wedge.p0, e);
        const double r1 = distance(a, wedge.p0 + a1 * e);
        const double r2 = distance(b, wedge.p0 + a2 * e);
        if (r1 + r2 == 0.0)
            return a1;
        return a1 + (a2 - a1) * r1 / (r1 + r2);
    }

    std::vector<ImagePath> im_single_diffraction(const Scene &scene)
    {
        std::vector<ImagePath> out;
        for (const auto &w : scene.wedges)
        {
            const double s = fermat_edge_parameter(scene.tx, scene.rx, w);
            const double len = w.length();
            if (!(s > 1e-9 * len && s < len * (1.0 - 1e-9)))
                continue;
            const Vec3 q = w.p0 + s * w.direction();
            if (distance(q, scene.tx) == 0.0 || distance(q, scene.rx) == 0.0)
                continue;
            auto path = finish_path(scene, {Interaction{InteractionKind::diffraction, w.id, q, {}}});
            if (validate_path(path, scene))
                out.push_back(std::move(path));
        }
        sort_paths(out);
        return out;
    }

    std::vector<ImagePath> im_trace(const Scene &scene, int refl_order, int diff_order)
    {
        if (diff_order < 0 || diff_order > 1)
            throw std::invalid_argument("Diffraction order must be 0 or 1.");
        auto out = im_reflections(scene, refl_order);
        if (diff_order == 1)
        {
            auto d = im_single_diffraction(scene);
            out.insert(out.end(), std::make_move_iterator(d.begin()), std::make_move_iterator(d.end()));
            sort_paths(out);
        }
        return out;
    }
}
