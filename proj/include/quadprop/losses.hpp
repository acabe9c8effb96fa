// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "quadprop/boxcoder.hpp"
#include "quadprop/error.hpp"

namespace quadprop {

struct SmoothL1Result {
    double loss = 0.0;
    Delta8 gradient;  // d loss / d pred
};

/// Sum over the eight components of 0.5 d^2 (|d| < 1) or |d| - 0.5.
inline SmoothL1Result smooth_l1(const Delta8& pred, const Delta8& target) {
    SmoothL1Result r;
    for (std::size_t i = 0; i < 8; ++i) {
        const double d = pred[i] - target[i];
        const double ad = std::abs(d);
        if (ad < 1.0) {
            r.loss += 0.5 * d * d;
            r.gradient[i] = d;
        } else {
            r.loss += ad - 0.5;
            r.gradient[i] = d > 0.0 ? 1.0 : -1.0;
        }
    }
    return r;
}

struct SoftmaxCeResult {
    double loss = 0.0;
    std::vector<double> gradient;  // d loss / d logits
};

/// -log softmax(logits)[label], computed with the max subtracted first.
inline SoftmaxCeResult softmax_ce(std::span<const double> logits, std::size_t label) {
    if (logits.size() < 2) {
        throw IndexError("softmax_ce needs at least two classes");
    }
    if (label >= logits.size()) {
        throw IndexError("label " + std::to_string(label) + " out of range for " + std::to_string(logits.size()) +
                         " classes");
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    SoftmaxCeResult r;
    r.gradient.resize(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        r.gradient[i] = std::exp(logits[i] - m);
        sum += r.gradient[i];
    }
    r.loss = std::log(sum) - (logits[label] - m);
    for (double& g : r.gradient) {
        g /= sum;
    }
    r.gradient[label] -= 1.0;
    return r;
}

} // namespace quadprop
