// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0
//
// DOTA annotation and Task-1 detection files, and tiling of large scenes.
//
// Annotation line:  x1 y1 x2 y2 x3 y3 x4 y4 category difficult
// Detection line:   image_id score x1 y1 x2 y2 x3 y3 x4 y4   (one file per class)
// Output uses LF line endings and six decimals; CRLF input is accepted.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "quadprop/error.hpp"
#include "quadprop/geometry.hpp"
#include "quadprop/postprocess.hpp"

namespace quadprop {

inline constexpr std::size_t kNumCategories = 15;

inline constexpr std::array<std::string_view, kNumCategories> kCategoryNames{
    "plane",        "baseball-diamond", "bridge",           "ground-track-field", "small-vehicle",
    "large-vehicle", "ship",            "tennis-court",     "basketball-court",   "storage-tank",
    "soccer-ball-field", "roundabout",  "harbor",           "swimming-pool",      "helicopter"};

// Column headings used in result tables.
inline constexpr std::array<std::string_view, kNumCategories> kCategoryAbbreviations{
    "Plane", "BD", "Bridge", "GTF", "SV", "LV", "Ship", "TC", "BC", "ST", "SBF", "RA", "Harbor", "SP", "HC"};

inline std::optional<int> category_index(std::string_view name) {
    for (std::size_t i = 0; i < kNumCategories; ++i) {
        if (kCategoryNames[i] == name) {
            return static_cast<int>(i);
        }
    }
    return std::nullopt;
}

inline std::optional<int> category_from_abbreviation(std::string_view abbr) {
    for (std::size_t i = 0; i < kNumCategories; ++i) {
        if (kCategoryAbbreviations[i] == abbr) {
            return static_cast<int>(i);
        }
    }
    return std::nullopt;
}

inline std::string_view category_name(int id) {
    if (id < 0 || static_cast<std::size_t>(id) >= kNumCategories) {
        throw IndexError("category id " + std::to_string(id) + " out of range");
    }
    return kCategoryNames[static_cast<std::size_t>(id)];
}

inline std::string_view category_abbreviation(int id) {
    category_name(id);
    return kCategoryAbbreviations[static_cast<std::size_t>(id)];
}

struct AnnotationRecord {
    Quad quad;
    int category = 0;
    bool difficult = false;

    friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

struct ParsedAnnotations {
    std::vector<AnnotationRecord> records;
    std::size_t skipped_lines = 0;     // headers and lines without 10 tokens
    std::size_t degenerate = 0;        // quads rejected by canonicalize
    std::size_t unknown_category = 0;  // 10-token lines naming a category outside the 15
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        out.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

inline double parse_real(std::string_view tok, std::size_t line_no) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
    }
    return v;
}

} // namespace detail

/// Fixed six-decimal formatting, independent of the global locale.
inline std::string format_fixed(double v, int decimals = 6) {
    std::array<char, 64> buf{};
    if (v == 0.0) {
        v = 0.0;  // drop the sign of -0
    }
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
    if (ec != std::errc()) {
        throw std::runtime_error("number too large to format");
    }
    std::string s(buf.data(), ptr);
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') {
        s.erase(0, 1);
    }
    return s;
}

inline ParsedAnnotations parse_annotations(std::string_view text) {
    ParsedAnnotations out;
    const std::vector<std::string_view> lines = detail::split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::vector<std::string_view> tok = detail::split_ws(lines[n]);
        if (tok.empty()) {
            continue;
        }
        if (tok.size() != 10) {
            ++out.skipped_lines;
            continue;
        }
        std::array<double, 8> c{};
        for (std::size_t i = 0; i < 8; ++i) {
            c[i] = detail::parse_real(tok[i], n + 1);
        }
        bool difficult = false;
        if (tok[9] == "1") {
            difficult = true;
        } else if (tok[9] != "0") {
            throw ParseError("line " + std::to_string(n + 1) + ": difficulty must be 0 or 1, got '" +
                             std::string(tok[9]) + "'");
        }
        const std::optional<int> cat = category_index(tok[8]);
        if (!cat) {
            ++out.unknown_category;
            continue;
        }
        try {
            out.records.push_back({quad_from_coords(c), *cat, difficult});
        } catch (const DegenerateQuad&) {
            ++out.degenerate;
        }
    }
    return out;
}

inline std::string write_annotations(std::span<const AnnotationRecord> records,
                                     std::span<const std::string> header_lines = {}) {
    std::string out;
    for (const std::string& h : header_lines) {
        out += h;
        out += '\n';
    }
    for (const AnnotationRecord& r : records) {
        for (double v : coords(r.quad)) {
            out += format_fixed(v);
            out += ' ';
        }
        out += category_name(r.category);
        out += r.difficult ? " 1\n" : " 0\n";
    }
    return out;
}

// image id -> detections on that image
using DetectionSet = std::map<std::string, std::vector<Detection>>;

inline std::string detection_file_name(int category) { return "Task1_" + std::string(category_name(category)) + ".txt"; }

/// Text of every per-class file, keyed by category id. All 15 classes are
/// present even when empty. Images in id order, then score descending,
/// then source_index.
inline std::map<int, std::string> format_detections(const DetectionSet& dets) {
    std::map<int, std::string> files;
    for (std::size_t c = 0; c < kNumCategories; ++c) {
        files[static_cast<int>(c)];
    }
    for (const auto& [image_id, list] : dets) {
        std::vector<Detection> sorted = list;
        std::stable_sort(sorted.begin(), sorted.end(), score_order);
        for (const Detection& d : sorted) {
            category_name(d.class_id);
            std::string& f = files.at(d.class_id);
            f += image_id;
            f += ' ';
            f += format_fixed(d.score);
            for (double v : coords(d.quad)) {
                f += ' ';
                f += format_fixed(v);
            }
            f += '\n';
        }
    }
    return files;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Writes Task1_<category>.txt for all 15 categories into `dir`.
inline void write_detections(const std::filesystem::path& dir, const DetectionSet& dets) {
    std::filesystem::create_directories(dir);
    for (const auto& [cat, text] : format_detections(dets)) {
        write_text_file(dir / detection_file_name(cat), text);
    }
}

inline void write_detections(const std::filesystem::path& dir, const std::string& image_id,
                             std::span<const Detection> dets) {
    write_detections(dir, DetectionSet{{image_id, {dets.begin(), dets.end()}}});
}

/// Parses one per-class detection file. source_index is the 0-based line
/// number, so ties stay in file order.
inline DetectionSet parse_detections(std::string_view text, int category) {
    DetectionSet out;
    const std::vector<std::string_view> lines = detail::split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::vector<std::string_view> tok = detail::split_ws(lines[n]);
        if (tok.empty()) {
            continue;
        }
        if (tok.size() != 10) {
            throw ParseError("detection line " + std::to_string(n + 1) + ": expected 10 tokens, got " +
                             std::to_string(tok.size()));
        }
        Detection d;
        d.score = detail::parse_real(tok[1], n + 1);
        std::array<double, 8> c{};
        for (std::size_t i = 0; i < 8; ++i) {
            c[i] = detail::parse_real(tok[i + 2], n + 1);
        }
        try {
            d.quad = quad_from_coords(c);
        } catch (const DegenerateQuad&) {
            continue;
        }
        d.class_id = category;
        d.source_index = static_cast<std::int64_t>(n);
        out[std::string(tok[0])].push_back(d);
    }
    return out;
}

/// Reads every Task1_<category>.txt present in `dir`.
inline DetectionSet read_detections(const std::filesystem::path& dir) {
    DetectionSet out;
    for (std::size_t c = 0; c < kNumCategories; ++c) {
        const std::filesystem::path p = dir / detection_file_name(static_cast<int>(c));
        if (!std::filesystem::exists(p)) {
            continue;
        }
        for (auto& [image, list] : parse_detections(read_text_file(p), static_cast<int>(c))) {
            auto& dst = out[image];
            dst.insert(dst.end(), list.begin(), list.end());
        }
    }
    return out;
}

struct TileWindow {
    Point origin;
    int width = 0;
    int height = 0;

    friend bool operator==(const TileWindow&, const TileWindow&) = default;
};

namespace detail {

inline std::vector<int> tile_origins(int extent, int tile, int step) {
    std::vector<int> origins;
    if (extent <= tile) {
        origins.push_back(0);
        return origins;
    }
    int o = 0;
    while (true) {
        origins.push_back(o);
        if (o + tile >= extent) {
            break;
        }
        o += step;
        if (o + tile > extent) {
            o = extent - tile;
        }
    }
    return origins;
}

} // namespace detail

/// Overlapping windows over an image, row-major. Origins advance by
/// tile - overlap; the last window on each axis is pulled back so it ends at
/// the image edge. Images smaller than a tile get one window of their size.
inline std::vector<TileWindow> tile_plan(int img_w, int img_h, int tile, int overlap) {
    if (tile < 1 || overlap < 0 || overlap >= tile) {
        throw ConfigError("tiling needs tile >= 1 and 0 <= overlap < tile");
    }
    if (img_w < 1 || img_h < 1) {
        throw ConfigError("image dimensions must be positive");
    }
    const std::vector<int> xs = detail::tile_origins(img_w, tile, tile - overlap);
    const std::vector<int> ys = detail::tile_origins(img_h, tile, tile - overlap);
    std::vector<TileWindow> out;
    out.reserve(xs.size() * ys.size());
    for (int y : ys) {
        for (int x : xs) {
            out.push_back({{static_cast<double>(x), static_cast<double>(y)}, std::min(tile, img_w), std::min(tile, img_h)});
        }
    }
    return out;
}

inline Quad window_quad(const TileWindow& w) {
    const double x0 = w.origin.x;
    const double y0 = w.origin.y;
    return Quad{{Point{x0, y0}, Point{x0 + w.width, y0}, Point{x0 + w.width, y0 + w.height}, Point{x0, y0 + w.height}},
                false};
}

/// Reduces a convex polygon to at most four vertices by repeatedly dropping
/// the vertex whose removal loses the least area, then canonicalizes.
inline std::optional<Quad> polygon_to_quad(std::vector<Point> poly) {
    while (poly.size() > 4) {
        std::size_t best = 0;
        double best_loss = -1.0;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double loss = std::abs(orient(poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]));
            if (best_loss < 0.0 || loss < best_loss) {
                best_loss = loss;
                best = i;
            }
        }
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(best));
    }
    if (poly.size() < 3) {
        return std::nullopt;
    }
    if (poly.size() == 3) {
        poly.push_back(poly.back());
    }
    try {
        return canonicalize(std::array<Point, 4>{poly[0], poly[1], poly[2], poly[3]});
    } catch (const DegenerateQuad&) {
        return std::nullopt;
    }
}

/// Ground truth for one window, in window-local coordinates. An object is
/// kept when at least min_fraction of its area falls inside the window; it is
/// then clipped to the window.
inline std::vector<AnnotationRecord> crop_annotations(std::span<const AnnotationRecord> records,
                                                      const TileWindow& window, double min_fraction = 0.7) {
    const Quad wq = window_quad(window);
    std::vector<AnnotationRecord> out;
    for (const AnnotationRecord& r : records) {
        const double full = area(r.quad);
        if (!(full > 0.0)) {
            continue;
        }
        const std::vector<Point> clipped = clip_polygon({r.quad.v.begin(), r.quad.v.end()}, wq.v);
        if (clipped.size() < 3 || polygon_area(clipped) < min_fraction * full) {
            continue;
        }
        std::optional<Quad> q = polygon_to_quad(clipped);
        if (!q) {
            continue;
        }
        out.push_back({translated(*q, -window.origin.x, -window.origin.y), r.category, r.difficult});
    }
    return out;
}

/// Moves window-local detections to image coordinates and removes
/// duplicates from overlap zones with per-class NMS.
inline std::vector<Detection> merge_tiles(std::span<const std::vector<Detection>> per_window,
                                          std::span<const TileWindow> windows, double nms_iou) {
    if (per_window.size() != windows.size()) {
        throw ConfigError("merge_tiles needs one detection list per window");
    }
    std::vector<Detection> all;
    for (std::size_t w = 0; w < windows.size(); ++w) {
        for (Detection d : per_window[w]) {
            d.quad = translated(d.quad, windows[w].origin.x, windows[w].origin.y);
            all.push_back(d);
        }
    }
    return batched_nms(all, nms_iou);
}

/// "<stem>__<x>__<y>", the image id given to a tile.
inline std::string tile_name(const std::string& stem, const TileWindow& w) {
    return stem + "__" + std::to_string(static_cast<long long>(w.origin.x)) + "__" +
           std::to_string(static_cast<long long>(w.origin.y));
}

struct TileId {
    std::string stem;
    int x = 0;
    int y = 0;
};

inline std::optional<TileId> parse_tile_name(std::string_view name) {
    const std::size_t second = name.rfind("__");
    if (second == std::string_view::npos || second == 0) {
        return std::nullopt;
    }
    const std::size_t first = name.rfind("__", second - 1);
    if (first == std::string_view::npos) {
        return std::nullopt;
    }
    auto to_int = [](std::string_view s, int& v) {
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return ec == std::errc() && p == s.data() + s.size() && !s.empty();
    };
    TileId id{std::string(name.substr(0, first)), 0, 0};
    if (!to_int(name.substr(first + 2, second - first - 2), id.x) || !to_int(name.substr(second + 2), id.y)) {
        return std::nullopt;
    }
    return id;
}

} // namespace quadprop
