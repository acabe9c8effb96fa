// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Planar geometry for four-point boxes: canonical vertex order, area,
// convex clipping and polygon IoU.
//
// Image coordinates are used throughout: x grows to the right, y grows
// downward. With that convention the usual shoelace sum is positive for a
// polygon traversed clockwise on screen, which is the canonical winding.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "quadprop/error.hpp"

namespace quadprop {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    Point operator*(double s) const { return {x * s, y * s}; }
};

inline double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }

// cross((b - a), (c - a)); positive for a clockwise-on-screen turn.
inline double orient(const Point& a, const Point& b, const Point& c) { return cross(b - a, c - a); }

/// Four vertices in canonical order.
///
/// `padded` marks a quad whose four input points had only three hull
/// vertices (one point strictly inside, or a repeated point). Such a quad is
/// stored as its hull triangle with the last vertex repeated.
struct Quad {
    std::array<Point, 4> v{};
    bool padded = false;

    friend bool operator==(const Quad&, const Quad&) = default;
};

struct Box {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    friend bool operator==(const Box&, const Box&) = default;
};

// Absolute tolerance for "same y" when picking the starting vertex.
inline constexpr double kStartTieTolerance = 1e-9;

inline bool is_finite(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double signed_area(std::span<const Point> poly) {
    const std::size_t n = poly.size();
    if (n < 3) {
        return 0.0;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += cross(poly[i], poly[(i + 1) % n]);
    }
    return 0.5 * acc;
}

inline double polygon_area(std::span<const Point> poly) { return std::abs(signed_area(poly)); }

inline double area(const Quad& q) { return polygon_area(q.v); }

inline Box aabb(std::span<const Point> poly) {
    Box b{poly[0].x, poly[0].y, poly[0].x, poly[0].y};
    for (const Point& p : poly.subspan(1)) {
        b.xmin = std::min(b.xmin, p.x);
        b.ymin = std::min(b.ymin, p.y);
        b.xmax = std::max(b.xmax, p.x);
        b.ymax = std::max(b.ymax, p.y);
    }
    return b;
}

inline Box aabb(const Quad& q) { return aabb(std::span<const Point>(q.v)); }

// Strict separation; boxes that merely touch are not disjoint.
inline bool disjoint(const Box& a, const Box& b) {
    return a.xmax < b.xmin || b.xmax < a.xmin || a.ymax < b.ymin || b.ymax < a.ymin;
}

/// Axis-aligned IoU, the rectangular baseline.
inline double box_iou(const Box& a, const Box& b) {
    const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
    const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
    if (iw <= 0.0 || ih <= 0.0) {
        return 0.0;
    }
    const double inter = iw * ih;
    const double uni = (a.xmax - a.xmin) * (a.ymax - a.ymin) + (b.xmax - b.xmin) * (b.ymax - b.ymin) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

namespace detail {

template <std::size_t N>
std::size_t start_index(const std::array<Point, N>& pts, std::size_t count) {
    double ymin = pts[0].y;
    for (std::size_t i = 1; i < count; ++i) {
        ymin = std::min(ymin, pts[i].y);
    }
    std::size_t best = count;
    for (std::size_t i = 0; i < count; ++i) {
        if (pts[i].y <= ymin + kStartTieTolerance && (best == count || pts[i].x < pts[best].x)) {
            best = i;
        }
    }
    return best;
}

// Rotates the first `count` points so the canonical start vertex leads.
template <std::size_t N>
void rotate_to_start(std::array<Point, N>& pts, std::size_t count) {
    const std::size_t s = start_index(pts, count);
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(s),
                pts.begin() + static_cast<std::ptrdiff_t>(count));
}

inline bool convex_cycle(const std::array<Point, 4>& p) {
    bool pos = false;
    bool neg = false;
    for (std::size_t i = 0; i < 4; ++i) {
        const double t = orient(p[i], p[(i + 1) % 4], p[(i + 2) % 4]);
        pos = pos || t > 0.0;
        neg = neg || t < 0.0;
    }
    return !(pos && neg) && signed_area(p) != 0.0;
}

inline Quad padded_triangle(Point a, Point b, Point c) {
    std::array<Point, 3> t{a, b, c};
    if (signed_area(t) < 0.0) {
        std::swap(t[1], t[2]);
    }
    rotate_to_start(t, 3);
    return Quad{{t[0], t[1], t[2], t[2]}, true};
}

inline std::string describe(std::span<const Point> pts) {
    std::string s;
    for (const Point& p : pts) {
        s += "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
    }
    return s;
}

} // namespace detail

/// Puts four points into canonical order: convex traversal, clockwise on
/// screen, starting at the minimum-y vertex (ties to minimum x).
///
/// Self-intersecting orders are repaired through the convex hull. When the
/// hull has only three vertices the result is the hull triangle with its last
/// vertex repeated and `padded` set. Throws DegenerateQuad when the points
/// are non-finite, all collinear, or have fewer than three distinct values.
inline Quad canonicalize(std::span<const Point, 4> input) {
    for (const Point& p : input) {
        if (!is_finite(p)) {
            throw DegenerateQuad("non-finite vertex in " + detail::describe(input));
        }
    }

    std::vector<Point> distinct;
    for (const Point& p : input) {
        if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) {
            distinct.push_back(p);
        }
    }
    if (distinct.size() < 3) {
        throw DegenerateQuad("coincident vertices in " + detail::describe(input));
    }

    const Box box = aabb(input);
    const double extent = std::max(box.xmax - box.xmin, box.ymax - box.ymin);
    const double collinear_tol = 1e-12 * extent * extent;

    if (distinct.size() == 3) {
        if (std::abs(orient(distinct[0], distinct[1], distinct[2])) <= collinear_tol) {
            throw DegenerateQuad("collinear vertices in " + detail::describe(input));
        }
        return detail::padded_triangle(distinct[0], distinct[1], distinct[2]);
    }

    // Largest of the four triangles; zero only when everything is collinear.
    static constexpr std::array<std::array<int, 3>, 4> kTriangles{{{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};
    double best_tri = -1.0;
    std::size_t best_tri_idx = 0;
    for (std::size_t i = 0; i < kTriangles.size(); ++i) {
        const auto& t = kTriangles[i];
        const double a = std::abs(orient(input[t[0]], input[t[1]], input[t[2]]));
        if (a > best_tri) {
            best_tri = a;
            best_tri_idx = i;
        }
    }
    if (best_tri <= collinear_tol) {
        throw DegenerateQuad("collinear vertices in " + detail::describe(input));
    }

    static constexpr std::array<std::array<int, 4>, 3> kCycles{{{0, 1, 2, 3}, {0, 1, 3, 2}, {0, 2, 1, 3}}};
    for (const auto& c : kCycles) {
        std::array<Point, 4> p{input[c[0]], input[c[1]], input[c[2]], input[c[3]]};
        if (detail::convex_cycle(p)) {
            if (signed_area(p) < 0.0) {
                std::reverse(p.begin(), p.end());
            }
            detail::rotate_to_start(p, 4);
            return Quad{p, false};
        }
    }

    const auto& t = kTriangles[best_tri_idx];
    return detail::padded_triangle(input[t[0]], input[t[1]], input[t[2]]);
}

inline Quad canonicalize(const std::array<Point, 4>& input) { return canonicalize(std::span<const Point, 4>(input)); }

inline Quad canonicalize(const Quad& q) { return canonicalize(std::span<const Point, 4>(q.v)); }

/// Builds a quad from the flat (x1, y1, ..., x4, y4) layout and canonicalizes it.
inline Quad quad_from_coords(std::span<const double, 8> c) {
    return canonicalize(std::array<Point, 4>{Point{c[0], c[1]}, Point{c[2], c[3]}, Point{c[4], c[5]}, Point{c[6], c[7]}});
}

inline std::array<double, 8> coords(const Quad& q) {
    return {q.v[0].x, q.v[0].y, q.v[1].x, q.v[1].y, q.v[2].x, q.v[2].y, q.v[3].x, q.v[3].y};
}

inline Quad translated(const Quad& q, double dx, double dy) {
    Quad out = q;
    for (Point& p : out.v) {
        p.x += dx;
        p.y += dy;
    }
    return out;
}

/// Sutherland-Hodgman: clips `subject` by every edge of the convex polygon
/// `clip`. Zero-length clip edges are skipped, so padded quads work as clip
/// polygons. Either winding of `clip` is accepted.
inline std::vector<Point> clip_polygon(std::vector<Point> subject, std::span<const Point> clip) {
    const std::size_t n = clip.size();
    const double sign = signed_area(clip) < 0.0 ? -1.0 : 1.0;
    std::vector<Point> output;
    output.reserve(subject.size() + n);

    for (std::size_t e = 0; e < n && !subject.empty(); ++e) {
        const Point& a = clip[e];
        const Point& b = clip[(e + 1) % n];
        if (a == b) {
            continue;
        }
        const Point edge = b - a;
        auto side = [&](const Point& p) { return sign * cross(edge, p - a); };

        output.clear();
        const std::size_t m = subject.size();
        for (std::size_t i = 0; i < m; ++i) {
            const Point& cur = subject[i];
            const Point& prev = subject[(i + m - 1) % m];
            const double sc = side(cur);
            const double sp = side(prev);
            if (sc >= 0.0) {
                if (sp < 0.0) {
                    output.push_back(prev + (cur - prev) * (sp / (sp - sc)));
                }
                output.push_back(cur);
            } else if (sp >= 0.0) {
                output.push_back(prev + (cur - prev) * (sp / (sp - sc)));
            }
        }
        subject.swap(output);
    }
    return subject;
}

/// Area of a ∩ b for convex quads. Disjoint inputs give 0.
inline double intersection_area(const Quad& a, const Quad& b) {
    if (area(a) == 0.0 || area(b) == 0.0) {
        return 0.0;
    }
    const std::vector<Point> poly = clip_polygon({a.v.begin(), a.v.end()}, b.v);
    if (poly.size() < 3) {
        return 0.0;
    }
    return std::min(polygon_area(poly), std::min(area(a), area(b)));
}

/// Polygon intersection over union, in [0, 1]; 0 when the union is empty.
inline double iou(const Quad& a, const Quad& b) {
    const double inter = intersection_area(a, b);
    const double uni = area(a) + area(b) - inter;
    if (!(uni > 0.0)) {
        return 0.0;
    }
    return std::clamp(inter / uni, 0.0, 1.0);
}

} // namespace quadprop
