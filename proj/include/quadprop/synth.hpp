// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic aerial scenes (bright rotated rectangles on a dark noisy
// background) and an oracle proposal scorer that stands in for a perfectly
// trained RPN.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadprop/anchors.hpp"
#include "quadprop/boxcoder.hpp"
#include "quadprop/dota_io.hpp"
#include "quadprop/error.hpp"
#include "quadprop/geometry.hpp"
#include "quadprop/model.hpp"
#include "quadprop/postprocess.hpp"
#include "quadprop/rng.hpp"

namespace quadprop {

struct SceneConfig {
    int width = 512;
    int height = 512;
    int n_objects = 10;
    double min_size = 16.0;
    double max_size = 96.0;
    double min_angle_deg = -90.0;
    double max_angle_deg = 90.0;

    void validate() const {
        if (width < 1 || height < 1) {
            throw ConfigError("scene dimensions must be positive");
        }
        if (n_objects < 0) {
            throw ConfigError("n_objects must be >= 0");
        }
        if (!(min_size > 0.0) || min_size > max_size || max_size > std::min(width, height)) {
            throw ConfigError("size range must satisfy 0 < min <= max <= image side");
        }
        if (min_angle_deg > max_angle_deg) {
            throw ConfigError("angle range is inverted");
        }
    }
};

struct Scene {
    FeatureMap image;  // 1 channel, values in [0, 1]
    std::vector<AnnotationRecord> gts;
    std::uint64_t seed = 0;
};

inline constexpr double kMaxSceneOverlap = 0.05;

/// Canonical quad of a w x h rectangle centered at c, rotated by angle_deg.
inline Quad rotated_rect(Point c, double w, double h, double angle_deg) {
    const double t = angle_deg * std::numbers::pi / 180.0;
    const double cs = std::cos(t);
    const double sn = std::sin(t);
    std::array<Point, 4> p;
    const std::array<Point, 4> local{Point{-w / 2, -h / 2}, Point{w / 2, -h / 2}, Point{w / 2, h / 2},
                                     Point{-w / 2, h / 2}};
    for (std::size_t i = 0; i < 4; ++i) {
        p[i] = {c.x + local[i].x * cs - local[i].y * sn, c.y + local[i].x * sn + local[i].y * cs};
    }
    return canonicalize(p);
}

inline bool contains(const Quad& q, const Point& p) {
    for (std::size_t i = 0; i < 4; ++i) {
        const Point& a = q.v[i];
        const Point& b = q.v[(i + 1) % 4];
        if (a != b && orient(a, b, p) < 0.0) {
            return false;
        }
    }
    return true;
}

/// Places cfg.n_objects rotated rectangles by rejection sampling so every
/// pair overlaps by IoU < 0.05, then renders them. Categories cycle through
/// the 15 classes in order. Fully determined by `seed`.
inline Scene generate_scene(std::uint64_t seed, const SceneConfig& cfg = {}) {
    cfg.validate();
    Rng place(seed, 1);
    Scene s{FeatureMap(1, cfg.height, cfg.width), {}, seed};

    const std::size_t max_attempts = 10ULL * static_cast<std::size_t>(cfg.n_objects) * 100ULL;
    std::size_t attempts = 0;
    while (s.gts.size() < static_cast<std::size_t>(cfg.n_objects)) {
        if (attempts++ >= max_attempts) {
            throw PlacementError("placed only " + std::to_string(s.gts.size()) + " of " +
                                 std::to_string(cfg.n_objects) + " objects after " + std::to_string(max_attempts) +
                                 " attempts");
        }
        const double w = place.uniform(cfg.min_size, cfg.max_size);
        const double h = place.uniform(cfg.min_size, cfg.max_size);
        const double angle = place.uniform(cfg.min_angle_deg, cfg.max_angle_deg);
        const double u = place.uniform01();
        const double v = place.uniform01();

        const Quad probe = rotated_rect({0.0, 0.0}, w, h, angle);
        const Box ext = aabb(probe);
        const double span_x = cfg.width - (ext.xmax - ext.xmin);
        const double span_y = cfg.height - (ext.ymax - ext.ymin);
        if (span_x < 0.0 || span_y < 0.0) {
            continue;
        }
        const Quad q = translated(probe, -ext.xmin + u * span_x, -ext.ymin + v * span_y);
        const bool clash = std::any_of(s.gts.begin(), s.gts.end(),
                                       [&](const AnnotationRecord& g) { return iou(g.quad, q) >= kMaxSceneOverlap; });
        if (clash) {
            continue;
        }
        const int category = static_cast<int>(s.gts.size() % kNumCategories);
        s.gts.push_back({q, category, false});
    }

    Rng paint(seed, 2);
    for (double& px : s.image.data()) {
        px = paint.uniform(0.0, 0.2);
    }
    for (const AnnotationRecord& g : s.gts) {
        const Box b = aabb(g.quad);
        const int y0 = std::max(0, static_cast<int>(std::floor(b.ymin)));
        const int y1 = std::min(cfg.height - 1, static_cast<int>(std::ceil(b.ymax)));
        const int x0 = std::max(0, static_cast<int>(std::floor(b.xmin)));
        const int x1 = std::min(cfg.width - 1, static_cast<int>(std::ceil(b.xmax)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (contains(g.quad, {x + 0.5, y + 0.5})) {
                    s.image.at(0, y, x) = paint.uniform(0.8, 1.0);
                }
            }
        }
    }
    return s;
}

struct OracleOptions {
    double epsilon = 0.0;  // half-width of uniform noise added to each delta
    std::uint64_t noise_seed = 0;
    AssignConfig assign{};
};

struct ScoredProposal {
    double score = 0.0;                // max IoU against any gt
    std::optional<Delta8> deltas;      // positives only
    int class_id = -1;                 // category of the regressed gt
};

/// What a perfect RPN would output: every anchor scored by its best IoU,
/// positives carrying the exact regression target plus optional noise.
inline std::vector<ScoredProposal> oracle_score(std::span<const Anchor> anchors,
                                                std::span<const AnnotationRecord> gts, const OracleOptions& opts = {}) {
    if (anchors.empty()) {
        throw ConfigError("oracle_score needs at least one anchor");
    }
    std::vector<Quad> quads;
    for (const AnnotationRecord& g : gts) {
        quads.push_back(g.quad);
    }
    const std::vector<AnchorLabel> labels = assign_targets(anchors, quads, opts.assign);

    Rng noise(opts.noise_seed, 3);
    std::vector<ScoredProposal> out(anchors.size());
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        out[a].score = labels[a].max_iou;
        if (labels[a].state != LabelState::positive) {
            continue;
        }
        Delta8 d = *labels[a].target;
        if (opts.epsilon > 0.0) {
            for (double& x : d.d) {
                x += noise.uniform(-opts.epsilon, opts.epsilon);
            }
        }
        out[a].deltas = d;
        out[a].class_id = gts[*labels[a].matched_gt].category;
    }
    return out;
}

/// Decodes the positive proposals into detections (source_index = anchor
/// index). Proposals that decode to a degenerate quad are dropped.
inline std::vector<Detection> decode_proposals(std::span<const Anchor> anchors,
                                               std::span<const ScoredProposal> proposals) {
    std::vector<Detection> out;
    for (std::size_t a = 0; a < anchors.size() && a < proposals.size(); ++a) {
        if (!proposals[a].deltas) {
            continue;
        }
        try {
            out.push_back({decode(anchors[a], *proposals[a].deltas), std::clamp(proposals[a].score, 0.0, 1.0),
                           proposals[a].class_id, static_cast<std::int64_t>(a)});
        } catch (const DegenerateQuad&) {
        }
    }
    return out;
}

/// Anchors for every level of `pyramid` over an image of the given size.
inline std::vector<Anchor> pyramid_anchors(const AnchorSpec& spec, const PyramidSpec& pyramid, int img_h, int img_w) {
    std::vector<Anchor> all;
    for (const PyramidLevel& l : pyramid.levels) {
        const int fh = std::max(1, img_h / l.stride);
        const int fw = std::max(1, img_w / l.stride);
        const std::vector<Anchor> a = grid_anchors(spec, fh, fw, static_cast<double>(l.stride), l.level);
        all.insert(all.end(), a.begin(), a.end());
    }
    return all;
}

} // namespace quadprop
