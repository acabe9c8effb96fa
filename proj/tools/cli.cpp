// Copyright (C) 2026 The quadprop Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quadprop/quadprop.hpp"

namespace quadprop::cli {
namespace {

namespace fs = std::filesystem;

// Flag values keyed by config key; applied on top of the --config file.
using Overrides = std::map<std::string, std::string>;

struct Common {
    std::string config_path;
    Overrides overrides;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "key = value config file; flags override it");
}

void add_key(CLI::App* sub, const std::string& flag, const std::string& key, Common& c, const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&c, key](const std::string& v) { c.overrides[key] = v; }, help);
}

Config resolve(const Common& c) {
    Config cfg;
    if (!c.config_path.empty()) {
        cfg = load_config(c.config_path);
    }
    for (const auto& [k, v] : c.overrides) {
        cfg.set(k, v);
    }
    cfg.validate();
    return cfg;
}

Quad parse_quad_arg(const std::string& s) {
    std::vector<double> v;
    try {
        v = parse_real_list("quad", s);
    } catch (const ConfigError&) {
        throw ParseError("quad must be 8 comma-separated numbers: '" + s + "'");
    }
    if (v.size() != 8) {
        throw ParseError("quad must be 8 comma-separated numbers: '" + s + "'");
    }
    return quad_from_coords(std::span<const double, 8>(v.data(), 8));
}

// CSV detections: x1,y1,x2,y2,x3,y3,x4,y4,score,class_id. A first line that
// does not start with a number is a header.
std::vector<Detection> read_detection_csv(std::istream& in) {
    std::vector<Detection> out;
    std::string line;
    std::size_t line_no = 0;
    std::int64_t index = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (detail::trim(line).empty()) {
            continue;
        }
        const std::vector<std::string_view> tok = detail::split(line, ',');
        if (line_no == 1 && !tok.empty() && !tok[0].empty() &&
            !(std::isdigit(static_cast<unsigned char>(tok[0][0])) || tok[0][0] == '-' || tok[0][0] == '.' ||
              tok[0][0] == '+')) {
            continue;
        }
        if (tok.size() != 10) {
            throw ParseError("csv line " + std::to_string(line_no) + ": expected 10 fields");
        }
        std::array<double, 8> c{};
        for (std::size_t i = 0; i < 8; ++i) {
            c[i] = detail::parse_real(tok[i], line_no);
        }
        Detection d;
        d.quad = quad_from_coords(c);
        d.score = detail::parse_real(tok[8], line_no);
        if (d.score < 0.0 || d.score > 1.0) {
            throw ParseError("csv line " + std::to_string(line_no) + ": score outside [0, 1]");
        }
        const double cls = detail::parse_real(tok[9], line_no);
        if (cls != std::floor(cls) || cls < 0) {
            throw ParseError("csv line " + std::to_string(line_no) + ": class_id must be a non-negative integer");
        }
        d.class_id = static_cast<int>(cls);
        d.source_index = index++;
        out.push_back(d);
    }
    return out;
}

void write_detection_csv(std::ostream& out, std::span<const Detection> dets) {
    out << "x1,y1,x2,y2,x3,y3,x4,y4,score,class_id\n";
    for (const Detection& d : dets) {
        for (double v : coords(d.quad)) {
            out << format_fixed(v) << ',';
        }
        out << format_fixed(d.score) << ',' << d.class_id << '\n';
    }
}

std::pair<int, int> parse_grid(const std::string& s) {
    const auto x = s.find_first_of("xX");
    if (x == std::string::npos) {
        throw ConfigError("grid must look like HxW, got '" + s + "'");
    }
    return {detail::parse_number<int>("grid", std::string_view(s).substr(0, x)),
            detail::parse_number<int>("grid", std::string_view(s).substr(x + 1))};
}

GroundTruthSet read_ground_truth_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("ground-truth directory not found: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".txt") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    GroundTruthSet gts;
    for (const fs::path& f : files) {
        gts[f.stem().string()] = parse_annotations(read_text_file(f)).records;
    }
    return gts;
}

std::vector<ClassAP> read_per_class(const fs::path& path) {
    std::vector<ClassAP> out;
    const std::string text = read_text_file(path);
    std::size_t line_no = 0;
    for (std::string_view line : detail::split_lines(text)) {
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string_view> tok = detail::split(line, ',');
        if (tok.size() == 1) {
            tok = detail::split_ws(line);
        }
        if (tok.size() != 2) {
            throw ParseError("per-class line " + std::to_string(line_no) + ": expected 'category,ap'");
        }
        std::optional<int> cat = category_index(tok[0]);
        if (!cat) {
            cat = category_from_abbreviation(tok[0]);
        }
        if (!cat) {
            if (line_no == 1) {
                continue;  // header
            }
            throw ParseError("per-class line " + std::to_string(line_no) + ": unknown category '" +
                             std::string(tok[0]) + "'");
        }
        ClassAP ap;
        ap.category = std::string(category_name(*cat));
        ap.ap = detail::parse_real(tok[1], line_no);
        if (ap.ap < 0.0 || ap.ap > 1.0) {
            throw ParseError("per-class line " + std::to_string(line_no) + ": AP outside [0, 1]");
        }
        out.push_back(ap);
    }
    return out;
}

void print_eval(std::ostream& out, std::span<const ClassAP> per_class, double map) {
    out << "category             abbr      n_gt    n_det        ap\n";
    for (const ClassAP& c : per_class) {
        const int id = *category_index(c.category);
        std::ostringstream row;
        row << std::left;
        row.width(20);
        row << c.category << ' ';
        row.width(8);
        row << category_abbreviation(id) << std::right;
        row.width(6);
        row << c.n_gt << ' ';
        row.width(8);
        row << c.n_det << ' ';
        row.width(9);
        row << format_fixed(c.ap);
        out << row.str() << (c.no_ground_truth ? "  (no ground truth)" : "") << '\n';
    }
    out << "All = " << format_fixed(map) << '\n';
}

void write_eval_files(const std::string& csv_path, const std::string& json_path, std::span<const ClassAP> per_class,
                      double map) {
    if (!csv_path.empty()) {
        std::string csv = "category,abbreviation,n_gt,n_det,ap\n";
        for (const ClassAP& c : per_class) {
            csv += c.category + "," + std::string(category_abbreviation(*category_index(c.category))) + "," +
                   std::to_string(c.n_gt) + "," + std::to_string(c.n_det) + "," + format_fixed(c.ap) + "\n";
        }
        csv += "All,All,,," + format_fixed(map) + "\n";
        write_text_file(csv_path, csv);
    }
    if (!json_path.empty()) {
        nlohmann::ordered_json j;
        j["classes"] = nlohmann::ordered_json::array();
        for (const ClassAP& c : per_class) {
            j["classes"].push_back({{"category", c.category},
                                    {"abbreviation", std::string(category_abbreviation(*category_index(c.category)))},
                                    {"n_gt", c.n_gt},
                                    {"n_det", c.n_det},
                                    {"ap", std::stod(format_fixed(c.ap))},
                                    {"no_ground_truth", c.no_ground_truth}});
        }
        j["mAP"] = std::stod(format_fixed(map));
        write_text_file(json_path, j.dump(2) + "\n");
    }
}

int cmd_iou(const std::string& a, const std::string& b, bool axis_aligned, std::ostream& out) {
    const Quad qa = parse_quad_arg(a);
    const Quad qb = parse_quad_arg(b);
    out << format_fixed(axis_aligned ? box_iou(aabb(qa), aabb(qb)) : iou(qa, qb)) << '\n';
    return kOk;
}

int cmd_anchors(const Config& cfg, const std::string& grid, double stride, int level, std::ostream& out) {
    const auto [h, w] = parse_grid(grid);
    const std::vector<Anchor> anchors = grid_anchors(cfg.anchors, h, w, stride, level);
    out << "center_x,center_y,w,h,level\n";
    for (const Anchor& a : anchors) {
        out << format_fixed(a.center.x) << ',' << format_fixed(a.center.y) << ',' << format_fixed(a.width) << ','
            << format_fixed(a.height) << ',' << a.level << '\n';
    }
    return kOk;
}

int cmd_nms(const Config& cfg, const std::string& input, bool plain, std::istream& in, std::ostream& out) {
    std::vector<Detection> dets;
    if (input.empty() || input == "-") {
        dets = read_detection_csv(in);
    } else {
        std::ifstream f(input);
        if (!f) {
            throw std::runtime_error("cannot open " + input);
        }
        dets = read_detection_csv(f);
    }
    write_detection_csv(out, batched_nms(dets, cfg.nms_iou, NmsOptions{!plain}));
    return kOk;
}

int cmd_tile(const Config& cfg, int width, int height, const std::string& ann, const std::string& image,
             const std::string& out_dir, const std::string& name, std::ostream& out) {
    std::optional<FeatureMap> img;
    if (!image.empty()) {
        img = read_pnm(image);
        width = img->width();
        height = img->height();
    }
    if (width < 1 || height < 1) {
        throw ConfigError("tile needs --width/--height or --image");
    }
    const std::vector<TileWindow> windows = tile_plan(width, height, cfg.tile, cfg.overlap);
    out << "x,y,w,h\n";
    for (const TileWindow& w : windows) {
        out << static_cast<long long>(w.origin.x) << ',' << static_cast<long long>(w.origin.y) << ',' << w.width << ','
            << w.height << '\n';
    }
    if (ann.empty() && !img) {
        return kOk;
    }
    if (out_dir.empty()) {
        throw ConfigError("--out is required with --ann or --image");
    }
    fs::create_directories(out_dir);
    std::string stem = name;
    if (stem.empty()) {
        stem = fs::path(!ann.empty() ? ann : image).stem().string();
    }
    std::vector<AnnotationRecord> records;
    if (!ann.empty()) {
        records = parse_annotations(read_text_file(ann)).records;
    }
    for (const TileWindow& w : windows) {
        const fs::path base = fs::path(out_dir) / tile_name(stem, w);
        if (!ann.empty()) {
            write_text_file(base.string() + ".txt",
                            write_annotations(crop_annotations(records, w, cfg.crop_min_fraction)));
        }
        if (img) {
            write_pgm(base.string() + ".pgm",
                      crop(*img, static_cast<int>(w.origin.x), static_cast<int>(w.origin.y), w.width, w.height));
        }
    }
    return kOk;
}

int cmd_merge(const Config& cfg, const std::string& dets_dir, const std::string& out_dir, std::ostream& out) {
    if (!fs::is_directory(dets_dir)) {
        throw std::runtime_error("detection directory not found: " + dets_dir);
    }
    const DetectionSet tiles = read_detections(dets_dir);

    // stem -> (windows, per-window detections)
    std::map<std::string, std::pair<std::vector<TileWindow>, std::vector<std::vector<Detection>>>> groups;
    for (const auto& [id, list] : tiles) {
        const std::optional<TileId> t = parse_tile_name(id);
        const std::string stem = t ? t->stem : id;
        auto& g = groups[stem];
        g.first.push_back({{t ? static_cast<double>(t->x) : 0.0, t ? static_cast<double>(t->y) : 0.0}, 0, 0});
        g.second.push_back(list);
    }
    DetectionSet merged;
    std::size_t total = 0;
    for (auto& [stem, g] : groups) {
        merged[stem] = merge_tiles(g.second, g.first, cfg.nms_iou);
        total += merged[stem].size();
    }
    write_detections(out_dir, merged);
    out << "merged " << tiles.size() << " tiles into " << merged.size() << " images, " << total << " detections\n";
    return kOk;
}

int cmd_eval(const Config& cfg, const std::string& gt_dir, const std::string& dets_dir, const std::string& per_class,
             const std::string& classes, const std::string& csv, const std::string& json, std::ostream& out) {
    std::vector<std::string> names = all_category_names();
    std::vector<int> ids;
    if (!classes.empty()) {
        names.clear();
        for (std::string_view t : detail::split(classes, ',')) {
            std::optional<int> id = category_index(t);
            if (!id) {
                id = category_from_abbreviation(t);
            }
            if (!id) {
                throw ConfigError("unknown class '" + std::string(t) + "'");
            }
            ids.push_back(*id);
            names.emplace_back(category_name(*id));
        }
    }

    if (!per_class.empty()) {
        const std::vector<ClassAP> aps = read_per_class(per_class);
        const double map = mean_ap(aps, names);
        std::vector<ClassAP> shown;
        for (const std::string& n : names) {
            shown.push_back(*std::find_if(aps.begin(), aps.end(), [&](const ClassAP& a) { return a.category == n; }));
        }
        print_eval(out, shown, map);
        write_eval_files(csv, json, shown, map);
        return kOk;
    }
    if (gt_dir.empty() || dets_dir.empty()) {
        throw ConfigError("eval needs --gt and --dets, or --per-class");
    }
    if (!fs::is_directory(dets_dir)) {
        throw std::runtime_error("detection directory not found: " + dets_dir);
    }
    EvalOptions opts{cfg.eval_iou, cfg.ap_method, ids};
    const EvalResult r = evaluate(read_ground_truth_dir(gt_dir), read_detections(dets_dir), opts);
    print_eval(out, r.per_class, r.map);
    write_eval_files(csv, json, r.per_class, r.map);
    return kOk;
}

int cmd_synth(const Config& cfg, const SceneConfig& scene_cfg, const std::string& out_dir, std::ostream& out) {
    const Scene s = generate_scene(cfg.seed, scene_cfg);
    fs::create_directories(out_dir);
    const std::string stem = "scene_" + std::to_string(cfg.seed);
    write_pgm(fs::path(out_dir) / (stem + ".pgm"), s.image);
    const std::vector<std::string> header{"imagesource:quadprop-synth", "gsd:null"};
    write_text_file(fs::path(out_dir) / (stem + ".txt"), write_annotations(s.gts, header));
    out << "wrote " << stem << ".pgm and " << stem << ".txt (" << s.gts.size() << " objects)\n";
    return kOk;
}

int cmd_detect(const Config& cfg, const std::string& image, const std::string& output, std::ostream& out) {
    const FeatureMap raw = read_pnm(image);
    const PyramidSpec pyramid;
    const int div = pyramid.max_stride();
    const int ph = (raw.height() + div - 1) / div * div;
    const int pw = (raw.width() + div - 1) / div * div;
    const FeatureMap img = crop(raw, 0, 0, pw, ph);

    const std::vector<FeatureMap> taps = backbone_forward(img, cfg.seed, pyramid);
    const std::vector<FeatureMap> p = fpn_fuse(taps, cfg.lateral_channels, cfg.seed, cfg.upsample);

    struct Candidate {
        double score;
        Anchor anchor;
        Delta8 deltas;
    };
    std::vector<Candidate> cands;
    for (std::size_t k = 0; k < pyramid.levels.size(); ++k) {
        const PyramidLevel& lvl = pyramid.levels[k];
        const std::vector<AnchorShape> shapes = level_shapes(cfg.anchors, lvl.level);
        if (shapes.empty()) {
            continue;
        }
        const int ns = static_cast<int>(shapes.size());
        const RpnOutput o = RpnHead::seeded(p[k].channels(), ns, cfg.seed).forward(p[k]);
        const std::vector<Anchor> anchors =
            grid_anchors(cfg.anchors, p[k].height(), p[k].width(), static_cast<double>(lvl.stride), lvl.level);
        std::size_t a = 0;
        for (int y = 0; y < p[k].height(); ++y) {
            for (int x = 0; x < p[k].width(); ++x) {
                for (int s = 0; s < ns; ++s, ++a) {
                    Delta8 d;
                    for (int j = 0; j < 8; ++j) {
                        d[static_cast<std::size_t>(j)] = o.deltas.at(8 * s + j, y, x);
                    }
                    cands.push_back({o.objectness.at(s, y, x), anchors[a], d});
                }
            }
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    if (cands.size() > cfg.pre_nms_top_k) {
        cands.resize(cfg.pre_nms_top_k);
    }

    std::vector<Detection> dets;
    for (const Candidate& c : cands) {
        try {
            dets.push_back({decode(c.anchor, c.deltas), c.score, 0, static_cast<std::int64_t>(dets.size())});
        } catch (const DegenerateQuad&) {
        }
    }
    dets = filter_detections(dets, cfg.score_thr, cfg.pre_nms_top_k);
    std::vector<Detection> kept = quad_nms(dets, cfg.nms_iou);
    if (kept.size() > cfg.top_k) {
        kept.resize(cfg.top_k);
    }

    if (output.empty() || output == "-") {
        write_detection_csv(out, kept);
    } else {
        std::ofstream f(output, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw std::runtime_error("cannot open " + output + " for writing");
        }
        write_detection_csv(f, kept);
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"quadprop: four-point region proposals, polygon IoU/NMS and DOTA evaluation"};
    app.name("quadprop");
    app.require_subcommand(1);

    Common common;

    // iou
    std::string qa;
    std::string qb;
    bool axis_aligned = false;
    auto* iou_cmd = app.add_subcommand("iou", "Polygon IoU of two quads");
    add_common(iou_cmd, common);
    iou_cmd->add_option("--a", qa, "x1,y1,x2,y2,x3,y3,x4,y4")->required();
    iou_cmd->add_option("--b", qb, "x1,y1,x2,y2,x3,y3,x4,y4")->required();
    iou_cmd->add_flag("--aabb", axis_aligned, "Axis-aligned IoU of the bounding boxes instead");

    // anchors
    std::string grid = "1x1";
    double stride = 16.0;
    int level = 0;
    auto* anchors_cmd = app.add_subcommand("anchors", "Dump grid anchors as CSV");
    add_common(anchors_cmd, common);
    add_key(anchors_cmd, "--base", "base_size", common, "Anchor base size in pixels");
    add_key(anchors_cmd, "--scales", "scales", common, "Comma-separated scales");
    add_key(anchors_cmd, "--ratios", "ratios", common, "Comma-separated w:h ratios");
    add_key(anchors_cmd, "--scale-levels", "scale_levels", common, "Pyramid level per scale");
    anchors_cmd->add_option("--grid", grid, "Feature grid HxW");
    anchors_cmd->add_option("--stride", stride, "Grid stride in pixels");
    anchors_cmd->add_option("--level", level, "Pyramid level index");

    // nms
    std::string nms_input;
    bool nms_plain = false;
    auto* nms_cmd = app.add_subcommand("nms", "Per-class quad NMS over CSV detections (stdin -> stdout)");
    add_common(nms_cmd, common);
    add_key(nms_cmd, "--iou", "nms_iou", common, "Suppression IoU threshold");
    nms_cmd->add_option("--input", nms_input, "CSV file instead of stdin");
    nms_cmd->add_flag("--no-fast-reject", nms_plain, "Clip every pair, skipping the bounding-box test");

    // tile
    int tile_w = 0;
    int tile_h = 0;
    std::string tile_ann;
    std::string tile_image;
    std::string tile_out;
    std::string tile_name_arg;
    auto* tile_cmd = app.add_subcommand("tile", "Plan overlapping windows; optionally split annotations/images");
    add_common(tile_cmd, common);
    add_key(tile_cmd, "--tile", "tile", common, "Window size in pixels");
    add_key(tile_cmd, "--overlap", "overlap", common, "Overlap between windows in pixels");
    add_key(tile_cmd, "--min-fraction", "crop_min_fraction", common, "Area fraction needed to keep a cropped object");
    tile_cmd->add_option("--width", tile_w, "Image width");
    tile_cmd->add_option("--height", tile_h, "Image height");
    tile_cmd->add_option("--ann", tile_ann, "DOTA annotation file to split");
    tile_cmd->add_option("--image", tile_image, "PGM/PPM image to split");
    tile_cmd->add_option("--out", tile_out, "Output directory for per-window files");
    tile_cmd->add_option("--name", tile_name_arg, "Stem for window file names");

    // merge
    std::string merge_dets;
    std::string merge_out;
    auto* merge_cmd = app.add_subcommand("merge", "Merge per-window Task1 detections back to full images");
    add_common(merge_cmd, common);
    add_key(merge_cmd, "--iou", "nms_iou", common, "NMS IoU for overlap-zone duplicates");
    merge_cmd->add_option("--dets", merge_dets, "Directory of per-window Task1_<class>.txt files")->required();
    merge_cmd->add_option("--out", merge_out, "Output directory")->required();

    // eval
    std::string eval_gt;
    std::string eval_dets;
    std::string eval_per_class;
    std::string eval_classes;
    std::string eval_csv;
    std::string eval_json;
    auto* eval_cmd = app.add_subcommand("eval", "Per-class AP and mAP");
    add_common(eval_cmd, common);
    add_key(eval_cmd, "--iou", "eval_iou", common, "Match IoU threshold");
    add_key(eval_cmd, "--method", "ap_method", common, "continuous | eleven_point");
    eval_cmd->add_option("--gt", eval_gt, "Directory of <image>.txt annotation files");
    eval_cmd->add_option("--dets", eval_dets, "Directory of Task1_<class>.txt files");
    eval_cmd->add_option("--per-class", eval_per_class, "Precomputed 'category,ap' lines; only the mean is computed");
    eval_cmd->add_option("--classes", eval_classes, "Comma-separated class list (default: all 15)");
    eval_cmd->add_option("--csv", eval_csv, "Also write results as CSV");
    eval_cmd->add_option("--json", eval_json, "Also write results as JSON");

    // synth
    SceneConfig scene_cfg;
    std::string synth_out = ".";
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic scene (PGM + DOTA annotations)");
    add_common(synth_cmd, common);
    add_key(synth_cmd, "--seed", "seed", common, "Scene seed");
    synth_cmd->add_option("--n", scene_cfg.n_objects, "Number of objects");
    synth_cmd->add_option("--width", scene_cfg.width, "Image width");
    synth_cmd->add_option("--height", scene_cfg.height, "Image height");
    synth_cmd->add_option("--min-size", scene_cfg.min_size, "Smallest object side");
    synth_cmd->add_option("--max-size", scene_cfg.max_size, "Largest object side");
    synth_cmd->add_option("--min-angle", scene_cfg.min_angle_deg, "Smallest rotation (degrees)");
    synth_cmd->add_option("--max-angle", scene_cfg.max_angle_deg, "Largest rotation (degrees)");
    synth_cmd->add_option("--out", synth_out, "Output directory");

    // detect
    std::string detect_image;
    std::string detect_output;
    auto* detect_cmd = app.add_subcommand("detect", "Toy backbone + FPN + RPN proposals on a PGM image");
    add_common(detect_cmd, common);
    add_key(detect_cmd, "--seed", "seed", common, "Weight seed");
    add_key(detect_cmd, "--iou", "nms_iou", common, "NMS IoU threshold");
    add_key(detect_cmd, "--score-thr", "score_thr", common, "Minimum objectness");
    add_key(detect_cmd, "--top-k", "top_k", common, "Detections kept after NMS");
    add_key(detect_cmd, "--pre-nms-top-k", "pre_nms_top_k", common, "Proposals kept before NMS");
    add_key(detect_cmd, "--lateral-channels", "lateral_channels", common, "Pyramid channel width");
    add_key(detect_cmd, "--upsample", "upsample", common, "nearest | bilinear");
    detect_cmd->add_option("--image", detect_image, "PGM/PPM input")->required();
    detect_cmd->add_option("--output", detect_output, "CSV output file (default stdout)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kConfigError;
    }

    try {
        const Config cfg = resolve(common);
        if (iou_cmd->parsed()) {
            return cmd_iou(qa, qb, axis_aligned, out);
        }
        if (anchors_cmd->parsed()) {
            return cmd_anchors(cfg, grid, stride, level, out);
        }
        if (nms_cmd->parsed()) {
            return cmd_nms(cfg, nms_input, nms_plain, in, out);
        }
        if (tile_cmd->parsed()) {
            return cmd_tile(cfg, tile_w, tile_h, tile_ann, tile_image, tile_out, tile_name_arg, out);
        }
        if (merge_cmd->parsed()) {
            return cmd_merge(cfg, merge_dets, merge_out, out);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(cfg, eval_gt, eval_dets, eval_per_class, eval_classes, eval_csv, eval_json, out);
        }
        if (synth_cmd->parsed()) {
            return cmd_synth(cfg, scene_cfg, synth_out, out);
        }
        if (detect_cmd->parsed()) {
            return cmd_detect(cfg, detect_image, detect_output, out);
        }
    } catch (const quadprop::ConfigError& e) {
        err << "quadprop: config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "quadprop: " << e.what() << '\n';
        return kInputError;
    }
    return kConfigError;
}

} // namespace quadprop::cli
