// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flat `key = value` configuration shared by all CLI commands.
//
//   # comment
//   base_size = 16
//   scales    = 4,8,16,32,64
//   ratios    = 1:1,1:2,2:1,1:8,8:1
//   nms_iou   = 0.5
//
// Keys are listed in Config::keys(). Unknown keys and malformed values are
// ConfigErrors.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quadprop/anchors.hpp"
#include "quadprop/boxcoder.hpp"
#include "quadprop/dota_io.hpp"
#include "quadprop/error.hpp"
#include "quadprop/eval.hpp"
#include "quadprop/model.hpp"

namespace quadprop {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t p = s.find(sep, start);
        out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
        if (p == std::string_view::npos) {
            break;
        }
        start = p + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view s) {
    s = trim(s);
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
        throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(s) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) {
            throw ConfigError("non-finite value for " + std::string(key));
        }
    }
    return v;
}

} // namespace detail

inline std::vector<double> parse_real_list(std::string_view key, std::string_view s) {
    std::vector<double> out;
    for (std::string_view t : detail::split(s, ',')) {
        out.push_back(detail::parse_number<double>(key, t));
    }
    return out;
}

inline std::vector<Ratio> parse_ratio_list(std::string_view key, std::string_view s) {
    std::vector<Ratio> out;
    for (std::string_view t : detail::split(s, ',')) {
        const std::vector<std::string_view> wh = detail::split(t, ':');
        if (wh.size() != 2) {
            throw ConfigError("ratio '" + std::string(t) + "' must look like w:h");
        }
        out.push_back({detail::parse_number<double>(key, wh[0]), detail::parse_number<double>(key, wh[1])});
    }
    return out;
}

struct Config {
    AnchorSpec anchors;
    AssignConfig assign;
    double nms_iou = 0.5;
    double score_thr = 0.0;
    std::size_t top_k = 1000;
    std::size_t pre_nms_top_k = 6000;
    std::size_t batch_size = 256;
    double pos_fraction = 0.5;
    int tile = 1024;
    int overlap = 200;
    double crop_min_fraction = 0.7;
    double eval_iou = 0.5;
    ApMethod ap_method = ApMethod::continuous;
    std::uint64_t seed = 0;
    int lateral_channels = 16;
    Upsample upsample = Upsample::nearest;

    static std::vector<std::string_view> keys() {
        return {"base_size", "scales",    "ratios",       "scale_levels", "pos_iou",  "neg_iou",
                "nms_iou",   "score_thr", "top_k",        "pre_nms_top_k", "batch_size", "pos_fraction",
                "tile",      "overlap",   "crop_min_fraction", "eval_iou", "ap_method", "seed",
                "lateral_channels", "upsample"};
    }

    void set(std::string_view key, std::string_view value) {
        using detail::parse_number;
        value = detail::trim(value);
        if (key == "base_size") {
            anchors.base_size = parse_number<double>(key, value);
        } else if (key == "scales") {
            anchors.scales = parse_real_list(key, value);
        } else if (key == "ratios") {
            anchors.ratios = parse_ratio_list(key, value);
        } else if (key == "scale_levels") {
            anchors.scale_levels.clear();
            if (!value.empty()) {
                for (std::string_view t : detail::split(value, ',')) {
                    anchors.scale_levels.push_back(parse_number<int>(key, t));
                }
            }
        } else if (key == "pos_iou") {
            assign.pos_iou = parse_number<double>(key, value);
        } else if (key == "neg_iou") {
            assign.neg_iou = parse_number<double>(key, value);
        } else if (key == "nms_iou") {
            nms_iou = parse_number<double>(key, value);
        } else if (key == "score_thr") {
            score_thr = parse_number<double>(key, value);
        } else if (key == "top_k") {
            top_k = parse_number<std::size_t>(key, value);
        } else if (key == "pre_nms_top_k") {
            pre_nms_top_k = parse_number<std::size_t>(key, value);
        } else if (key == "batch_size") {
            batch_size = parse_number<std::size_t>(key, value);
        } else if (key == "pos_fraction") {
            pos_fraction = parse_number<double>(key, value);
        } else if (key == "tile") {
            tile = parse_number<int>(key, value);
        } else if (key == "overlap") {
            overlap = parse_number<int>(key, value);
        } else if (key == "crop_min_fraction") {
            crop_min_fraction = parse_number<double>(key, value);
        } else if (key == "eval_iou") {
            eval_iou = parse_number<double>(key, value);
        } else if (key == "ap_method") {
            const auto m = parse_ap_method(value);
            if (!m) {
                throw ConfigError("ap_method must be continuous or eleven_point");
            }
            ap_method = *m;
        } else if (key == "seed") {
            seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "lateral_channels") {
            lateral_channels = parse_number<int>(key, value);
        } else if (key == "upsample") {
            if (value == "nearest") {
                upsample = Upsample::nearest;
            } else if (value == "bilinear") {
                upsample = Upsample::bilinear;
            } else {
                throw ConfigError("upsample must be nearest or bilinear");
            }
        } else {
            throw ConfigError("unknown config key '" + std::string(key) + "'");
        }
    }

    void validate() const {
        anchors.validate();
        assign.validate();
        auto unit = [](double v, const char* name) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ConfigError(std::string(name) + " must lie in [0, 1]");
            }
        };
        unit(nms_iou, "nms_iou");
        unit(score_thr, "score_thr");
        unit(eval_iou, "eval_iou");
        unit(crop_min_fraction, "crop_min_fraction");
        if (!(pos_fraction > 0.0 && pos_fraction < 1.0)) {
            throw ConfigError("pos_fraction must lie in (0, 1)");
        }
        if (tile < 1 || overlap < 0 || overlap >= tile) {
            throw ConfigError("tiling needs tile >= 1 and 0 <= overlap < tile");
        }
        if (lateral_channels < 1) {
            throw ConfigError("lateral_channels must be positive");
        }
    }
};

/// Parses `key = value` lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t line_no = 0;
    for (std::string_view line : detail::split_lines(text)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string_view key = detail::trim(line.substr(0, eq));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        out.emplace_back(std::string(key), std::string(detail::trim(line.substr(eq + 1))));
    }
    return out;
}

inline Config load_config(const std::filesystem::path& path, Config base = {}) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    for (const auto& [k, v] : parse_config_text(text)) {
        base.set(k, v);
    }
    return base;
}

} // namespace quadprop
