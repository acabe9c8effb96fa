// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "quadprop/geometry.hpp"

namespace quadprop {

struct Detection {
    Quad quad;
    double score = 0.0;
    int class_id = 0;
    std::int64_t source_index = 0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

// Score descending, then lower source_index first.
inline bool score_order(const Detection& a, const Detection& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.source_index < b.source_index;
}

struct NmsOptions {
    // Skip polygon clipping for pairs whose bounding boxes are disjoint.
    bool aabb_reject = true;
};

/// Greedy quadrilateral NMS for a single class. A candidate is suppressed
/// when its polygon IoU with a kept detection is strictly greater than
/// iou_threshold. Output is in kept (score) order.
inline std::vector<Detection> quad_nms(std::span<const Detection> dets, double iou_threshold, NmsOptions opts = {}) {
    std::vector<Detection> order(dets.begin(), dets.end());
    std::stable_sort(order.begin(), order.end(), score_order);

    std::vector<Box> boxes;
    boxes.reserve(order.size());
    for (const Detection& d : order) {
        boxes.push_back(aabb(d.quad));
    }

    std::vector<char> removed(order.size(), 0);
    std::vector<Detection> kept;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (removed[i]) {
            continue;
        }
        kept.push_back(order[i]);
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            if (removed[j]) {
                continue;
            }
            if (opts.aabb_reject && disjoint(boxes[i], boxes[j])) {
                continue;
            }
            if (iou(order[i].quad, order[j].quad) > iou_threshold) {
                removed[j] = 1;
            }
        }
    }
    return kept;
}

/// Runs quad_nms independently per class_id; classes come out in ascending id.
inline std::vector<Detection> batched_nms(std::span<const Detection> dets, double iou_threshold, NmsOptions opts = {}) {
    std::vector<int> classes;
    for (const Detection& d : dets) {
        classes.push_back(d.class_id);
    }
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    std::vector<Detection> out;
    std::vector<Detection> group;
    for (int c : classes) {
        group.clear();
        std::copy_if(dets.begin(), dets.end(), std::back_inserter(group),
                     [c](const Detection& d) { return d.class_id == c; });
        const std::vector<Detection> kept = quad_nms(group, iou_threshold, opts);
        out.insert(out.end(), kept.begin(), kept.end());
    }
    return out;
}

/// Drops scores below score_threshold, then keeps the top_k best by score.
/// Among equal scores the earlier input wins. Survivors keep input order.
inline std::vector<Detection> filter_detections(std::span<const Detection> dets, double score_threshold,
                                                std::size_t top_k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (dets[i].score >= score_threshold) {
            idx.push_back(i);
        }
    }
    if (idx.size() > top_k) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
        idx.resize(top_k);
        std::sort(idx.begin(), idx.end());
    }
    std::vector<Detection> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(dets[i]);
    }
    return out;
}

} // namespace quadprop
