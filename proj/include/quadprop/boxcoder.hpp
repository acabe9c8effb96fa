// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Four-point regression coding. Each of the eight targets is the offset of a
// ground-truth vertex from the matching anchor corner, normalized by the
// anchor width (x) or height (y). Corners are paired by canonical index.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "quadprop/anchors.hpp"
#include "quadprop/geometry.hpp"
#include "quadprop/rng.hpp"

namespace quadprop {

struct Delta8 {
    std::array<double, 8> d{};

    double& operator[](std::size_t i) { return d[i]; }
    double operator[](std::size_t i) const { return d[i]; }
    friend bool operator==(const Delta8&, const Delta8&) = default;
};

inline Delta8 encode(const Anchor& anchor, const Quad& gt) {
    const Quad g = canonicalize(gt);
    const Quad c = anchor_quad(anchor);
    Delta8 out;
    for (std::size_t k = 0; k < 4; ++k) {
        out[2 * k] = (g.v[k].x - c.v[k].x) / anchor.width;
        out[2 * k + 1] = (g.v[k].y - c.v[k].y) / anchor.height;
    }
    return out;
}

inline Quad decode(const Anchor& anchor, const Delta8& d) {
    const Quad c = anchor_quad(anchor);
    std::array<Point, 4> pts;
    for (std::size_t k = 0; k < 4; ++k) {
        pts[k] = {c.v[k].x + d[2 * k] * anchor.width, c.v[k].y + d[2 * k + 1] * anchor.height};
    }
    return canonicalize(pts);
}

enum class LabelState { negative, ignore, positive };

struct AnchorLabel {
    LabelState state = LabelState::negative;
    std::optional<std::size_t> matched_gt;
    std::optional<Delta8> target;
    double max_iou = 0.0;
};

struct AssignConfig {
    double pos_iou = 0.7;
    double neg_iou = 0.3;

    void validate() const {
        if (!(0.0 <= neg_iou && neg_iou <= pos_iou && pos_iou <= 1.0)) {
            throw ConfigError("assignment thresholds need 0 <= neg_iou <= pos_iou <= 1");
        }
    }
};

/// Polygon IoU between every anchor rectangle and every gt, row-major
/// [anchor][gt]. Pairs with disjoint bounding boxes are 0 without clipping.
inline std::vector<double> anchor_gt_iou(std::span<const Anchor> anchors, std::span<const Quad> gts) {
    std::vector<Box> gt_boxes;
    gt_boxes.reserve(gts.size());
    for (const Quad& g : gts) {
        gt_boxes.push_back(aabb(g));
    }
    std::vector<double> m(anchors.size() * gts.size(), 0.0);
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        const Quad aq = anchor_quad(anchors[a]);
        const Box ab = aabb(aq);
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (!disjoint(ab, gt_boxes[g])) {
                m[a * gts.size() + g] = iou(aq, gts[g]);
            }
        }
    }
    return m;
}

/// Labels anchors positive / negative / ignore.
///
/// Positive when the best IoU reaches pos_iou, or when the anchor is the
/// best anchor of some gt (ties to the lowest anchor index). Such forced
/// positives regress toward the gt that selected them. Negative below
/// neg_iou, ignore in between.
inline std::vector<AnchorLabel> assign_targets(std::span<const Anchor> anchors, std::span<const Quad> gts,
                                               const AssignConfig& cfg = {}) {
    cfg.validate();
    std::vector<AnchorLabel> labels(anchors.size());
    if (gts.empty() || anchors.empty()) {
        return labels;
    }
    const std::size_t ng = gts.size();
    const std::vector<double> m = anchor_gt_iou(anchors, gts);

    // Best anchor per gt.
    std::vector<std::size_t> gt_best(ng, 0);
    for (std::size_t g = 0; g < ng; ++g) {
        for (std::size_t a = 1; a < anchors.size(); ++a) {
            if (m[a * ng + g] > m[gt_best[g] * ng + g]) {
                gt_best[g] = a;
            }
        }
    }

    for (std::size_t a = 0; a < anchors.size(); ++a) {
        AnchorLabel& lab = labels[a];
        std::size_t best = 0;
        for (std::size_t g = 1; g < ng; ++g) {
            if (m[a * ng + g] > m[a * ng + best]) {
                best = g;
            }
        }
        lab.max_iou = m[a * ng + best];

        std::optional<std::size_t> forced;
        for (std::size_t g = 0; g < ng; ++g) {
            if (gt_best[g] == a && (!forced || m[a * ng + g] > m[a * ng + *forced])) {
                forced = g;
            }
        }

        if (lab.max_iou >= cfg.pos_iou) {
            lab.matched_gt = best;
        } else if (forced) {
            lab.matched_gt = forced;
        }
        if (lab.matched_gt) {
            lab.state = LabelState::positive;
            lab.target = encode(anchors[a], gts[*lab.matched_gt]);
        } else if (lab.max_iou < cfg.neg_iou) {
            lab.state = LabelState::negative;
        } else {
            lab.state = LabelState::ignore;
        }
    }
    return labels;
}

/// Seeded RPN minibatch: at most floor(size * pos_fraction) positives, the
/// rest negatives, fewer when not enough are available. Returns sorted
/// anchor indices.
inline std::vector<std::size_t> sample_minibatch(std::span<const AnchorLabel> labels, std::size_t size,
                                                 double pos_fraction, std::uint64_t seed) {
    if (!(pos_fraction > 0.0 && pos_fraction < 1.0)) {
        throw ConfigError("pos_fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].state == LabelState::positive) {
            pos.push_back(i);
        } else if (labels[i].state == LabelState::negative) {
            neg.push_back(i);
        }
    }

    Rng rng(seed);
    auto take = [&rng](std::vector<std::size_t>& pool, std::size_t k) {
        k = std::min(k, pool.size());
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
    };

    const auto pos_quota = static_cast<std::size_t>(std::floor(static_cast<double>(size) * pos_fraction));
    take(pos, pos_quota);
    take(neg, size - pos.size());

    std::vector<std::size_t> out = std::move(pos);
    out.insert(out.end(), neg.begin(), neg.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace quadprop
