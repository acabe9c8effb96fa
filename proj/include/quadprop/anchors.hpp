// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "quadprop/error.hpp"
#include "quadprop/geometry.hpp"

namespace quadprop {

// Width:height aspect. 1:2 is a tall box.
struct Ratio {
    double w = 1.0;
    double h = 1.0;

    friend bool operator==(const Ratio&, const Ratio&) = default;
};

struct AnchorSpec {
    double base_size = 16.0;
    std::vector<double> scales{4.0, 8.0, 16.0, 32.0, 64.0};
    std::vector<Ratio> ratios{{1, 1}, {1, 2}, {2, 1}, {1, 8}, {8, 1}};
    // Optional pyramid level per scale. Empty means every scale is placed at
    // every level; otherwise grid_anchors at level L only uses the scales
    // whose entry equals L.
    std::vector<int> scale_levels;

    void validate() const {
        if (!(base_size > 0.0) || !std::isfinite(base_size)) {
            throw ConfigError("anchor base size must be positive");
        }
        if (scales.empty() || ratios.empty()) {
            throw ConfigError("anchor scales and ratios must be non-empty");
        }
        for (double s : scales) {
            if (!(s > 0.0) || !std::isfinite(s)) {
                throw ConfigError("anchor scales must be positive");
            }
        }
        for (const Ratio& r : ratios) {
            if (!(r.w > 0.0) || !(r.h > 0.0) || !std::isfinite(r.w) || !std::isfinite(r.h)) {
                throw ConfigError("anchor ratio components must be positive");
            }
        }
        if (!scale_levels.empty() && scale_levels.size() != scales.size()) {
            throw ConfigError("scale_levels must have one entry per scale");
        }
    }
};

struct AnchorShape {
    double width = 0.0;
    double height = 0.0;
    std::size_t scale_index = 0;
};

struct Anchor {
    Point center;
    double width = 0.0;
    double height = 0.0;
    int level = 0;

    friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// One area-preserving shape per (scale, ratio), scale-major.
inline std::vector<AnchorShape> anchor_shapes(const AnchorSpec& spec) {
    spec.validate();
    std::vector<AnchorShape> shapes;
    shapes.reserve(spec.scales.size() * spec.ratios.size());
    for (std::size_t si = 0; si < spec.scales.size(); ++si) {
        const double side = spec.base_size * spec.scales[si];
        for (const Ratio& r : spec.ratios) {
            const double k = std::sqrt(r.w / r.h);
            shapes.push_back({side * k, side / k, si});
        }
    }
    return shapes;
}

/// Shapes placed at `level`, honoring spec.scale_levels when set.
inline std::vector<AnchorShape> level_shapes(const AnchorSpec& spec, int level) {
    std::vector<AnchorShape> shapes = anchor_shapes(spec);
    if (spec.scale_levels.empty()) {
        return shapes;
    }
    std::erase_if(shapes, [&](const AnchorShape& s) { return spec.scale_levels[s.scale_index] != level; });
    return shapes;
}

/// Anchors over a feat_h x feat_w grid: row-major cells, shape-minor.
/// Cell (i, j) is centered at ((j + 0.5) * stride, (i + 0.5) * stride).
inline std::vector<Anchor> grid_anchors(const AnchorSpec& spec, int feat_h, int feat_w, double stride, int level) {
    if (feat_h < 1 || feat_w < 1) {
        throw ConfigError("feature grid must be at least 1x1");
    }
    if (!(stride >= 1.0)) {
        throw ConfigError("anchor stride must be >= 1");
    }
    const std::vector<AnchorShape> shapes = level_shapes(spec, level);
    std::vector<Anchor> out;
    out.reserve(static_cast<std::size_t>(feat_h) * static_cast<std::size_t>(feat_w) * shapes.size());
    for (int i = 0; i < feat_h; ++i) {
        const double cy = (i + 0.5) * stride;
        for (int j = 0; j < feat_w; ++j) {
            const double cx = (j + 0.5) * stride;
            for (const AnchorShape& s : shapes) {
                out.push_back({{cx, cy}, s.width, s.height, level});
            }
        }
    }
    return out;
}

/// The anchor rectangle; already canonical (top-left corner first, clockwise).
inline Quad anchor_quad(const Anchor& a) {
    const double hw = 0.5 * a.width;
    const double hh = 0.5 * a.height;
    const double x0 = a.center.x - hw;
    const double x1 = a.center.x + hw;
    const double y0 = a.center.y - hh;
    const double y1 = a.center.y + hh;
    return Quad{{Point{x0, y0}, Point{x1, y0}, Point{x1, y1}, Point{x0, y1}}, false};
}

} // namespace quadprop
