// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "quadprop/error.hpp"
#include "quadprop/model.hpp"

namespace quadprop {

namespace detail {

inline int read_pnm_int(std::istream& in) {
    int c = in.peek();
    while (in && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
        } else {
            in.get();
        }
        c = in.peek();
    }
    int v = 0;
    if (!(in >> v) || v < 0) {
        throw ParseError("malformed PNM header");
    }
    return v;
}

} // namespace detail

/// Reads P2/P5 (gray) or P3/P6 (RGB) images scaled to [0, 1].
inline FeatureMap read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    const bool gray = magic == "P2" || magic == "P5";
    const bool binary = magic == "P5" || magic == "P6";
    if (!gray && magic != "P3" && magic != "P6") {
        throw ParseError(path.string() + ": not a PGM/PPM file");
    }
    const int w = detail::read_pnm_int(in);
    const int h = detail::read_pnm_int(in);
    const int maxval = detail::read_pnm_int(in);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) {
        throw ParseError(path.string() + ": bad PNM dimensions");
    }
    const int channels = gray ? 1 : 3;
    FeatureMap img(channels, h, w);
    if (binary) {
        in.get();  // single whitespace after maxval
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                int v = 0;
                if (!binary) {
                    v = detail::read_pnm_int(in);
                } else if (maxval < 256) {
                    v = in.get();
                } else {
                    const int hi = in.get();
                    v = (hi << 8) | in.get();
                }
                if (!in) {
                    throw ParseError(path.string() + ": truncated pixel data");
                }
                img.at(c, y, x) = static_cast<double>(v) / maxval;
            }
        }
    }
    return img;
}

/// Writes channel 0 as an 8-bit binary PGM, clamping to [0, 1].
inline void write_pgm(const std::filesystem::path& path, const FeatureMap& img) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<char> row(static_cast<std::size_t>(img.width()));
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double v = std::clamp(img.at(0, y, x), 0.0, 1.0);
            row[static_cast<std::size_t>(x)] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

/// Crops [x, x+w) x [y, y+h); parts outside the image read as 0.
inline FeatureMap crop(const FeatureMap& img, int x0, int y0, int w, int h) {
    FeatureMap out(img.channels(), h, w);
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const int sy = y0 + y;
                const int sx = x0 + x;
                if (sy >= 0 && sy < img.height() && sx >= 0 && sx < img.width()) {
                    out.at(c, y, x) = img.at(c, sy, sx);
                }
            }
        }
    }
    return out;
}

} // namespace quadprop
