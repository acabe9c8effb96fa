// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0
//
// VOC-style detection evaluation with polygon IoU.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quadprop/dota_io.hpp"
#include "quadprop/error.hpp"
#include "quadprop/geometry.hpp"
#include "quadprop/parallel.hpp"
#include "quadprop/postprocess.hpp"

namespace quadprop {

enum class MatchFlag { tp, fp, ignored };

enum class ApMethod { continuous, eleven_point };

inline std::optional<ApMethod> parse_ap_method(std::string_view s) {
    if (s == "continuous") {
        return ApMethod::continuous;
    }
    if (s == "eleven_point" || s == "11point") {
        return ApMethod::eleven_point;
    }
    return std::nullopt;
}

struct MatchResult {
    std::vector<MatchFlag> flags;                    // input order
    std::vector<std::optional<std::size_t>> matched; // gt index for TPs
};

/// Matches one image's detections of one class against its ground truth.
///
/// Detections are visited by score (ties by source_index). A detection is a
/// TP when the best-overlapping gt that is unmatched and not difficult
/// reaches iou_thr; that gt is then consumed. Failing that, a detection that
/// overlaps a difficult gt by iou_thr is ignored. Everything else is an FP.
inline MatchResult match_detections(std::span<const Detection> dets, std::span<const AnnotationRecord> gts,
                                    double iou_thr = 0.5) {
    std::vector<std::size_t> order(dets.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score_order(dets[a], dets[b]); });

    std::vector<Box> gt_boxes;
    for (const AnnotationRecord& g : gts) {
        gt_boxes.push_back(aabb(g.quad));
    }

    MatchResult r{std::vector<MatchFlag>(dets.size(), MatchFlag::fp),
                  std::vector<std::optional<std::size_t>>(dets.size())};
    std::vector<char> used(gts.size(), 0);
    for (std::size_t di : order) {
        const Box db = aabb(dets[di].quad);
        double best_open = -1.0;
        std::size_t best_open_idx = 0;
        double best_difficult = -1.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            const double o = disjoint(db, gt_boxes[g]) ? 0.0 : iou(dets[di].quad, gts[g].quad);
            if (gts[g].difficult) {
                best_difficult = std::max(best_difficult, o);
            } else if (!used[g] && o > best_open) {
                best_open = o;
                best_open_idx = g;
            }
        }
        if (best_open >= iou_thr) {
            r.flags[di] = MatchFlag::tp;
            r.matched[di] = best_open_idx;
            used[best_open_idx] = 1;
        } else if (best_difficult >= iou_thr) {
            r.flags[di] = MatchFlag::ignored;
        }
    }
    return r;
}

struct PRPoint {
    double recall = 0.0;
    double precision = 0.0;
    double score = 0.0;
};

/// Precision/recall after each scored detection; ignored entries are skipped.
inline std::vector<PRPoint> pr_curve(std::span<const MatchFlag> flags, std::span<const double> scores,
                                     std::size_t n_gt) {
    std::vector<PRPoint> curve;
    std::size_t tp = 0;
    std::size_t seen = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i] == MatchFlag::ignored) {
            continue;
        }
        ++seen;
        tp += flags[i] == MatchFlag::tp ? 1 : 0;
        curve.push_back({n_gt > 0 ? static_cast<double>(tp) / static_cast<double>(n_gt) : 0.0,
                         static_cast<double>(tp) / static_cast<double>(seen), i < scores.size() ? scores[i] : 0.0});
    }
    return curve;
}

/// AP from flags already sorted by descending score. Returns 0 when n_gt is 0.
///
/// continuous: area under the monotone precision envelope. Recall only grows
/// at TPs, each by 1/n_gt, so the area is sum(envelope at TPs) / n_gt.
/// eleven_point: mean over r in {0, 0.1, ..., 1} of the best precision at
/// recall >= r.
inline double average_precision(std::span<const MatchFlag> flags, std::size_t n_gt,
                                ApMethod method = ApMethod::continuous) {
    if (n_gt == 0) {
        return 0.0;
    }
    const std::vector<PRPoint> curve = pr_curve(flags, {}, n_gt);
    if (curve.empty()) {
        return 0.0;
    }
    if (method == ApMethod::eleven_point) {
        double sum = 0.0;
        for (int t = 0; t <= 10; ++t) {
            const double r = t / 10.0;
            double best = 0.0;
            for (const PRPoint& p : curve) {
                if (p.recall >= r) {
                    best = std::max(best, p.precision);
                }
            }
            sum += best;
        }
        return sum / 11.0;
    }

    std::vector<double> envelope(curve.size());
    double running = 0.0;
    for (std::size_t i = curve.size(); i-- > 0;) {
        running = std::max(running, curve[i].precision);
        envelope[i] = running;
    }
    double area = 0.0;
    std::size_t k = 0;
    for (const MatchFlag f : flags) {
        if (f == MatchFlag::ignored) {
            continue;
        }
        if (f == MatchFlag::tp) {
            area += envelope[k];
        }
        ++k;
    }
    return std::min(1.0, area / static_cast<double>(n_gt));
}

struct ClassAP {
    std::string category;
    double ap = 0.0;
    std::size_t n_gt = 0;
    std::size_t n_det = 0;
    bool no_ground_truth = false;  // AP set to 0 because there was nothing to find
};

/// Unweighted mean of the APs of `classes`; every listed class must appear.
inline double mean_ap(std::span<const ClassAP> per_class, std::span<const std::string> classes) {
    if (classes.empty()) {
        throw ConfigError("mean_ap needs at least one class");
    }
    double sum = 0.0;
    for (const std::string& c : classes) {
        auto it = std::find_if(per_class.begin(), per_class.end(), [&](const ClassAP& a) { return a.category == c; });
        if (it == per_class.end()) {
            throw ConfigError("no AP for configured class '" + c + "'");
        }
        sum += it->ap;
    }
    return sum / static_cast<double>(classes.size());
}

inline std::vector<std::string> all_category_names() {
    return {kCategoryNames.begin(), kCategoryNames.end()};
}

/// Mean over the 15 DOTA categories.
inline double mean_ap(std::span<const ClassAP> per_class) { return mean_ap(per_class, all_category_names()); }

using GroundTruthSet = std::map<std::string, std::vector<AnnotationRecord>>;

struct EvalOptions {
    double iou = 0.5;
    ApMethod method = ApMethod::continuous;
    std::vector<int> classes;  // empty = all 15
};

struct EvalResult {
    std::vector<ClassAP> per_class;
    double map = 0.0;
};

/// Corpus-level evaluation: each class's flags from every image are pooled
/// and ordered by score, then image id, then source_index, before AP.
inline EvalResult evaluate(const GroundTruthSet& gts, const DetectionSet& dets, const EvalOptions& opts = {}) {
    std::vector<int> classes = opts.classes;
    if (classes.empty()) {
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            classes.push_back(static_cast<int>(c));
        }
    }

    std::vector<std::string> images;
    for (const auto& [id, _] : gts) {
        images.push_back(id);
    }
    for (const auto& [id, _] : dets) {
        images.push_back(id);
    }
    std::sort(images.begin(), images.end());
    images.erase(std::unique(images.begin(), images.end()), images.end());

    struct Scored {
        double score;
        std::size_t image;
        std::int64_t source_index;
        MatchFlag flag;
    };

    EvalResult result;
    std::vector<std::string> names;
    for (int c : classes) {
        std::vector<std::vector<Scored>> per_image(images.size());
        std::vector<std::size_t> gt_count(images.size(), 0);
        parallel_for(images.size(), [&](std::size_t i) {
            std::vector<AnnotationRecord> g;
            if (auto it = gts.find(images[i]); it != gts.end()) {
                std::copy_if(it->second.begin(), it->second.end(), std::back_inserter(g),
                             [c](const AnnotationRecord& r) { return r.category == c; });
            }
            std::vector<Detection> d;
            if (auto it = dets.find(images[i]); it != dets.end()) {
                std::copy_if(it->second.begin(), it->second.end(), std::back_inserter(d),
                             [c](const Detection& x) { return x.class_id == c; });
            }
            gt_count[i] = static_cast<std::size_t>(
                std::count_if(g.begin(), g.end(), [](const AnnotationRecord& r) { return !r.difficult; }));
            const MatchResult m = match_detections(d, g, opts.iou);
            for (std::size_t k = 0; k < d.size(); ++k) {
                per_image[i].push_back({d[k].score, i, d[k].source_index, m.flags[k]});
            }
            std::vector<std::size_t> seen;
            for (const auto& mg : m.matched) {
                if (mg) {
                    seen.push_back(*mg);
                }
            }
            std::sort(seen.begin(), seen.end());
            if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
                throw std::logic_error("ground truth matched twice");
            }
        });

        std::vector<Scored> pooled;
        std::size_t n_gt = 0;
        for (std::size_t i = 0; i < images.size(); ++i) {
            pooled.insert(pooled.end(), per_image[i].begin(), per_image[i].end());
            n_gt += gt_count[i];
        }
        std::sort(pooled.begin(), pooled.end(), [](const Scored& a, const Scored& b) {
            if (a.score != b.score) {
                return a.score > b.score;
            }
            if (a.image != b.image) {
                return a.image < b.image;
            }
            return a.source_index < b.source_index;
        });
        std::vector<MatchFlag> flags;
        flags.reserve(pooled.size());
        for (const Scored& s : pooled) {
            flags.push_back(s.flag);
        }

        ClassAP ap;
        ap.category = std::string(category_name(c));
        ap.n_gt = n_gt;
        ap.n_det = pooled.size();
        ap.no_ground_truth = n_gt == 0;
        ap.ap = average_precision(flags, n_gt, opts.method);
        result.per_class.push_back(ap);
        names.push_back(ap.category);
    }
    result.map = mean_ap(result.per_class, names);
    return result;
}

} // namespace quadprop
