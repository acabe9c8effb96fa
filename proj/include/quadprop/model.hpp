// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0
//
// Toy multi-level backbone, top-down pyramid fusion and the RPN head.
//
// Everything here is untrained: weights are drawn from quadprop::Rng, one
// stream per layer, uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)), biases 0.
// Outputs are a pure function of (input, seed).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quadprop/error.hpp"
#include "quadprop/parallel.hpp"
#include "quadprop/rng.hpp"

namespace quadprop {

/// Dense channels x height x width grid, channel-major.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(int channels, int height, int width, double fill = 0.0)
        : channels_(channels), height_(height), width_(width),
          data_(checked_size(channels, height, width), fill) {}
    FeatureMap(int channels, int height, int width, std::vector<double> data)
        : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != checked_size(channels, height, width)) {
            throw ShapeError("feature map data size does not match its shape");
        }
    }

    int channels() const { return channels_; }
    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t plane() const { return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_); }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }
    std::span<const double> channel(int c) const { return std::span(data_).subspan(c * plane(), plane()); }
    std::span<double> channel(int c) { return std::span(data_).subspan(c * plane(), plane()); }

    double at(int c, int y, int x) const { return data_[index(c, y, x)]; }
    double& at(int c, int y, int x) { return data_[index(c, y, x)]; }

    bool same_shape(const FeatureMap& o) const {
        return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
    }

    friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
    static std::size_t checked_size(int c, int h, int w) {
        if (c < 1 || h < 1 || w < 1) {
            throw ShapeError("feature map dimensions must be positive");
        }
        return static_cast<std::size_t>(c) * static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
    }
    std::size_t index(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * height_ + static_cast<std::size_t>(y)) * width_ + static_cast<std::size_t>(x);
    }

    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

struct PyramidLevel {
    int level = 0;
    int stride = 0;
    int channels = 0;
};

struct PyramidSpec {
    std::vector<PyramidLevel> levels{{2, 4, 8}, {3, 8, 16}, {4, 16, 32}, {5, 32, 64}};

    void validate() const {
        if (levels.empty()) {
            throw ConfigError("pyramid needs at least one level");
        }
        for (std::size_t i = 0; i < levels.size(); ++i) {
            const PyramidLevel& l = levels[i];
            if (l.level < 1 || l.level > 16 || l.stride != (1 << l.level) || l.channels < 1) {
                throw ConfigError("pyramid level " + std::to_string(l.level) + " needs stride 2^level and channels > 0");
            }
            if (i > 0 && l.level != levels[i - 1].level + 1) {
                throw ConfigError("pyramid levels must be consecutive with increasing stride");
            }
        }
    }
    int max_stride() const { return levels.back().stride; }
};

/// 2-D convolution with zero padding k/2.
struct Conv2d {
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 1;
    int stride = 1;
    std::vector<double> weights;  // [out][in][ky][kx]
    std::vector<double> bias;     // [out]

    static Conv2d seeded(int in_ch, int out_ch, int kernel, int stride, std::uint64_t seed, std::uint64_t stream) {
        Conv2d c{in_ch, out_ch, kernel, stride, {}, std::vector<double>(static_cast<std::size_t>(out_ch), 0.0)};
        const std::size_t n = static_cast<std::size_t>(out_ch) * in_ch * kernel * kernel;
        const double bound = 1.0 / std::sqrt(static_cast<double>(in_ch * kernel * kernel));
        Rng rng(seed, stream);
        c.weights.resize(n);
        for (double& w : c.weights) {
            w = rng.uniform(-bound, bound);
        }
        return c;
    }

    /// 1x1 convolution copying input channel i to output channel i.
    static Conv2d identity(int channels) {
        Conv2d c{channels, channels, 1, 1, std::vector<double>(static_cast<std::size_t>(channels) * channels, 0.0),
                 std::vector<double>(static_cast<std::size_t>(channels), 0.0)};
        for (int i = 0; i < channels; ++i) {
            c.weights[static_cast<std::size_t>(i) * channels + i] = 1.0;
        }
        return c;
    }

    double weight(int o, int i, int ky, int kx) const {
        return weights[((static_cast<std::size_t>(o) * in_channels + i) * kernel + ky) * kernel + kx];
    }

    FeatureMap forward(const FeatureMap& in) const {
        if (in.channels() != in_channels) {
            throw ShapeError("conv expects " + std::to_string(in_channels) + " input channels, got " +
                             std::to_string(in.channels()));
        }
        const int pad = kernel / 2;
        const int oh = (in.height() + 2 * pad - kernel) / stride + 1;
        const int ow = (in.width() + 2 * pad - kernel) / stride + 1;
        FeatureMap out(out_channels, oh, ow);
        const int ih = in.height();
        const int iw = in.width();

        parallel_for(static_cast<std::size_t>(out_channels), [&](std::size_t oc_idx) {
            const int oc = static_cast<int>(oc_idx);
            std::span<double> dst = out.channel(oc);
            std::fill(dst.begin(), dst.end(), bias[oc_idx]);
            for (int ic = 0; ic < in_channels; ++ic) {
                std::span<const double> src = in.channel(ic);
                for (int ky = 0; ky < kernel; ++ky) {
                    for (int kx = 0; kx < kernel; ++kx) {
                        const double w = weight(oc, ic, ky, kx);
                        if (w == 0.0) {
                            continue;
                        }
                        // Output columns whose input column lies inside [0, iw).
                        const int off_x = kx - pad;
                        const int x_lo = off_x >= 0 ? 0 : (-off_x + stride - 1) / stride;
                        const int x_hi = iw - 1 - off_x < 0 ? 0 : std::min(ow, (iw - 1 - off_x) / stride + 1);
                        for (int oy = 0; oy < oh; ++oy) {
                            const int iy = oy * stride + ky - pad;
                            if (iy < 0 || iy >= ih) {
                                continue;
                            }
                            const double* srow = src.data() + static_cast<std::size_t>(iy) * iw;
                            double* drow = dst.data() + static_cast<std::size_t>(oy) * ow;
                            if (stride == 1) {
                                for (int ox = x_lo; ox < x_hi; ++ox) {
                                    drow[ox] += w * srow[ox + off_x];
                                }
                            } else {
                                for (int ox = x_lo; ox < x_hi; ++ox) {
                                    drow[ox] += w * srow[ox * stride + off_x];
                                }
                            }
                        }
                    }
                }
            }
        });
        return out;
    }
};

inline FeatureMap relu(FeatureMap m) {
    for (double& v : m.data()) {
        v = std::max(v, 0.0);
    }
    return m;
}

inline FeatureMap add(FeatureMap a, const FeatureMap& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("cannot add feature maps of different shapes");
    }
    std::span<double> da = a.data();
    std::span<const double> db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        da[i] += db[i];
    }
    return a;
}

enum class Upsample { nearest, bilinear };

/// 2x spatial upsampling. Bilinear uses half-pixel centers with edge clamping.
inline FeatureMap upsample2x(const FeatureMap& in, Upsample mode = Upsample::nearest) {
    const int h = in.height();
    const int w = in.width();
    FeatureMap out(in.channels(), 2 * h, 2 * w);
    for (int c = 0; c < in.channels(); ++c) {
        for (int y = 0; y < 2 * h; ++y) {
            for (int x = 0; x < 2 * w; ++x) {
                if (mode == Upsample::nearest) {
                    out.at(c, y, x) = in.at(c, y / 2, x / 2);
                    continue;
                }
                const double sy = std::clamp((y + 0.5) / 2.0 - 0.5, 0.0, static_cast<double>(h - 1));
                const double sx = std::clamp((x + 0.5) / 2.0 - 0.5, 0.0, static_cast<double>(w - 1));
                const int y0 = static_cast<int>(sy);
                const int x0 = static_cast<int>(sx);
                const int y1 = std::min(y0 + 1, h - 1);
                const int x1 = std::min(x0 + 1, w - 1);
                const double fy = sy - y0;
                const double fx = sx - x0;
                out.at(c, y, x) = (1 - fy) * ((1 - fx) * in.at(c, y0, x0) + fx * in.at(c, y0, x1)) +
                                  fy * ((1 - fx) * in.at(c, y1, x0) + fx * in.at(c, y1, x1));
            }
        }
    }
    return out;
}

namespace detail {

// Layer stream ids; each seeded layer draws from its own stream.
enum : std::uint64_t {
    kStreamStem = 1,
    kStreamBackbone = 100,
    kStreamLateral = 200,
    kStreamRpnConv = 300,
    kStreamRpnCls = 301,
    kStreamRpnReg = 302,
};

} // namespace detail

/// Backbone taps C2..C5 (or whatever `pyramid` lists).
///
/// stem: 3x3 stride-2 conv + ReLU. Each level: 3x3 stride-2 conv + ReLU,
/// then one residual block relu(x + conv(relu(conv(x)))).
inline std::vector<FeatureMap> backbone_forward(const FeatureMap& image, std::uint64_t seed,
                                                const PyramidSpec& pyramid = {}) {
    pyramid.validate();
    if (image.channels() < 1 || image.channels() > 3) {
        throw ShapeError("backbone input must have 1 to 3 channels");
    }
    const int div = pyramid.max_stride();
    if (image.height() % div != 0 || image.width() % div != 0) {
        throw ShapeError("input " + std::to_string(image.height()) + "x" + std::to_string(image.width()) +
                         " is not divisible by " + std::to_string(div));
    }

    const int stem_ch = pyramid.levels.front().channels;
    FeatureMap x = relu(Conv2d::seeded(image.channels(), stem_ch, 3, 2, seed, detail::kStreamStem).forward(image));
    int ch = stem_ch;
    // Stem output is at stride 2; downsample until the first requested level.
    for (int lvl = 2; lvl < pyramid.levels.front().level; ++lvl) {
        x = relu(Conv2d::seeded(ch, ch, 3, 2, seed, detail::kStreamBackbone + 10 * static_cast<std::uint64_t>(lvl))
                     .forward(x));
    }

    std::vector<FeatureMap> taps;
    taps.reserve(pyramid.levels.size());
    for (const PyramidLevel& l : pyramid.levels) {
        const std::uint64_t base = detail::kStreamBackbone + 10 * static_cast<std::uint64_t>(l.level);
        x = relu(Conv2d::seeded(ch, l.channels, 3, 2, seed, base).forward(x));
        ch = l.channels;
        const FeatureMap inner = relu(Conv2d::seeded(ch, ch, 3, 1, seed, base + 1).forward(x));
        x = relu(add(Conv2d::seeded(ch, ch, 3, 1, seed, base + 2).forward(inner), x));
        taps.push_back(x);
    }
    return taps;
}

inline void check_pyramid(std::span<const FeatureMap> c_maps) {
    if (c_maps.empty()) {
        throw ShapeError("empty pyramid");
    }
    for (std::size_t i = 1; i < c_maps.size(); ++i) {
        if (c_maps[i - 1].height() != 2 * c_maps[i].height() || c_maps[i - 1].width() != 2 * c_maps[i].width()) {
            throw ShapeError("pyramid level " + std::to_string(i - 1) + " is not twice the size of level " +
                             std::to_string(i));
        }
    }
}

/// Top-down fusion with explicit lateral convolutions, finest level first:
/// P_last = lateral(C_last), P_k = lateral(C_k) + upsample(P_{k+1}).
inline std::vector<FeatureMap> fpn_fuse(std::span<const FeatureMap> c_maps, std::span<const Conv2d> laterals,
                                        Upsample mode = Upsample::nearest) {
    check_pyramid(c_maps);
    if (laterals.size() != c_maps.size()) {
        throw ShapeError("need one lateral convolution per pyramid level");
    }
    std::vector<FeatureMap> p(c_maps.size());
    const std::size_t last = c_maps.size() - 1;
    p[last] = laterals[last].forward(c_maps[last]);
    for (std::size_t k = last; k-- > 0;) {
        p[k] = add(laterals[k].forward(c_maps[k]), upsample2x(p[k + 1], mode));
    }
    return p;
}

inline std::vector<Conv2d> seeded_laterals(std::span<const FeatureMap> c_maps, int lateral_channels,
                                           std::uint64_t seed) {
    if (lateral_channels < 1) {
        throw ConfigError("lateral_channels must be positive");
    }
    std::vector<Conv2d> laterals;
    for (std::size_t k = 0; k < c_maps.size(); ++k) {
        laterals.push_back(
            Conv2d::seeded(c_maps[k].channels(), lateral_channels, 1, 1, seed, detail::kStreamLateral + k));
    }
    return laterals;
}

inline std::vector<FeatureMap> fpn_fuse(std::span<const FeatureMap> c_maps, int lateral_channels, std::uint64_t seed,
                                        Upsample mode = Upsample::nearest) {
    check_pyramid(c_maps);
    const std::vector<Conv2d> laterals = seeded_laterals(c_maps, lateral_channels, seed);
    return fpn_fuse(c_maps, laterals, mode);
}

struct RpnOutput {
    FeatureMap objectness;  // num_shapes channels, in (0, 1)
    FeatureMap deltas;      // 8 * num_shapes channels; channel 8k + j is component j of shape k
};

struct RpnHead {
    Conv2d conv;
    Conv2d cls;
    Conv2d reg;

    static RpnHead seeded(int in_channels, int num_shapes, std::uint64_t seed) {
        if (num_shapes < 1) {
            throw ConfigError("rpn head needs at least one anchor shape");
        }
        return {Conv2d::seeded(in_channels, in_channels, 3, 1, seed, detail::kStreamRpnConv),
                Conv2d::seeded(in_channels, num_shapes, 1, 1, seed, detail::kStreamRpnCls),
                Conv2d::seeded(in_channels, 8 * num_shapes, 1, 1, seed, detail::kStreamRpnReg)};
    }

    RpnOutput forward(const FeatureMap& p_map) const {
        const FeatureMap hidden = relu(conv.forward(p_map));
        FeatureMap obj = cls.forward(hidden);
        for (double& v : obj.data()) {
            v = 1.0 / (1.0 + std::exp(-v));
        }
        return {std::move(obj), reg.forward(hidden)};
    }
};

inline RpnOutput rpn_head(const FeatureMap& p_map, int num_shapes, std::uint64_t seed) {
    return RpnHead::seeded(p_map.channels(), num_shapes, seed).forward(p_map);
}

} // namespace quadprop
