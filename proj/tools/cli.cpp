#include "cli.hpp"

#include "panicle/dataset_io.hpp"
#include "panicle/errors.hpp"
#include "panicle/flowering.hpp"
#include "panicle/report.hpp"
#include "panicle/split.hpp"
#include "panicle/synth.hpp"
#include "panicle/tiling.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <ostream>
#include <set>

namespace panicle::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
    std::string format = "coco-like-json";
    double iou_threshold = 0.5;
    double score_floor = 0.25;
    std::optional<double> min_area;
    double seam_iou = 0.5;
    std::uint64_t seed = 1;
    std::string out_dir = ".";

    // evaluate
    std::string gt_path;
    std::string det_path;
    std::string ap_mode = "literal";
    double ap_score_floor = 0.0;
    bool exclude_zero_gt = false;

    // flowering
    std::string counts_path;
    std::vector<std::string> detection_paths;
    std::string days_csv;

    // tile / merge
    int mosaic_width = 0;
    int mosaic_height = 0;
    int tile_width = 0;
    int tile_height = 0;
    int overlap_x = 0;
    int overlap_y = 0;
    std::string tiles_path;
    std::string mosaic_id = "mosaic";
    std::string mosaic_file;

    // split
    std::vector<double> ratios{0.8, 0.1, 0.1};

    // synth
    ScenarioSpec scenario;
    bool noiseless = false;
    bool tiled = false;
    TiledScenarioSpec tiled_spec;
};

Format selected_format(const RunConfig& cfg) { return parse_format(cfg.format); }

void write_output(const RunConfig& cfg, const std::string& name, const std::string& text) {
    write_text_file(fs::path(cfg.out_dir) / name, text);
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    const Format format = selected_format(cfg);
    const GroundTruthSet gt = load_ground_truth(cfg.gt_path, format);
    const DetectionSet det = load_detections(cfg.det_path, format);

    EvaluationConfig ec;
    ec.iou_threshold = cfg.iou_threshold;
    ec.ap_score_floor = cfg.ap_score_floor;
    ec.count_score_floor = cfg.score_floor;
    ec.min_area = cfg.min_area.value_or(0.0);
    ec.ap_mode = cfg.ap_mode == "interpolated" ? ApMode::Interpolated : ApMode::Literal;
    ec.exclude_zero_ground_truth = cfg.exclude_zero_gt;

    const EvaluationSummary summary = evaluate(gt, det, ec);
    const std::string table = to_table(summary);
    write_output(cfg, "evaluation.json", to_json(summary));
    write_output(cfg, "evaluation.txt", table);
    out << table;
    return kOk;
}

// ---------------------------------------------------------------- flowering

std::map<std::string, int> read_days_override(const std::string& path) {
    std::map<std::string, int> days;
    const std::string text = read_text_file(path);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != "image_id,days_after_planting") {
                throw ParseError("days CSV must start with header \"image_id,days_after_planting\"", 1);
            }
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("days CSV: expected 2 fields", line_no);
        int day = 0;
        const std::string field = line.substr(comma + 1);
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), day);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
            throw ParseError("days CSV: day must be an integer", line_no);
        }
        if (day < 0) throw ValidationError("days CSV line " + std::to_string(line_no) + ": negative day");
        days[line.substr(0, comma)] = day;
    }
    return days;
}

/// Groups the images of every detection input by day after planting. Days in
/// the override CSV take precedence over image records.
std::map<int, DetectionSet> group_by_day(const std::vector<DetectionSet>& inputs,
                                         const std::map<std::string, int>& override_days) {
    std::map<int, std::pair<std::vector<ImageRecord>, std::map<std::string, std::vector<ScoredBox>>>>
        grouped;
    std::set<std::string> seen;
    for (const auto& det : inputs) {
        for (const auto& image : det.images()) {
            if (!seen.insert(image.image_id).second) {
                throw ValidationError("image_id '" + image.image_id + "' appears in more than one input");
            }
            std::optional<int> day = image.days_after_planting;
            if (auto it = override_days.find(image.image_id); it != override_days.end()) day = it->second;
            if (!day) {
                throw ValidationError("image '" + image.image_id + "' has no days_after_planting");
            }
            auto& [images, boxes] = grouped[*day];
            images.push_back(image);
            boxes[image.image_id] = det.detections_for(image.image_id);
        }
    }
    std::map<int, DetectionSet> out;
    for (auto& [day, entry] : grouped) {
        out.emplace(day, DetectionSet(std::move(entry.first), std::move(entry.second)));
    }
    return out;
}

int cmd_flowering(const RunConfig& cfg, std::ostream& out) {
    FloweringReport report;
    report.score_floor = cfg.score_floor;
    report.min_area = cfg.min_area.value_or(0.0);
    if (!cfg.counts_path.empty()) {
        report.series = load_count_series(cfg.counts_path);
        report.source = "counts";
    } else {
        if (!cfg.min_area) {
            throw ValidationError("--min-area is required when counting from detections");
        }
        const Format format = selected_format(cfg);
        std::vector<DetectionSet> inputs;
        for (const auto& path : cfg.detection_paths) inputs.push_back(load_detections(path, format));
        const auto days = cfg.days_csv.empty() ? std::map<std::string, int>{} : read_days_override(cfg.days_csv);
        report.series = build_series(group_by_day(inputs, days), cfg.score_floor, *cfg.min_area);
        report.source = "detections";
    }

    const auto points = to_points(report.series);
    report.fit = fit_cubic(points);
    report.estimate = flowering_time(points, report.fit);
    const CurvePlot plot = emit_curve(report.fit, points, report.estimate);

    write_output(cfg, "series.csv", to_csv(report.series));
    write_output(cfg, "estimate.json", to_json(report));
    write_output(cfg, "curve.csv", plot.csv);
    write_output(cfg, "curve.svg", plot.svg);
    out << "flowering_day " << format_real(report.estimate.flowering_day) << "\n"
        << "ultimate_count " << format_real(report.estimate.ultimate_count) << "\n"
        << "half_level " << format_real(report.estimate.half_level) << "\n"
        << "residual_rms " << format_real(report.fit.residual_rms) << "\n";
    return kOk;
}

// ---------------------------------------------------------------- tile / merge

TileGrid grid_from(const RunConfig& cfg) {
    return build_grid(cfg.mosaic_width, cfg.mosaic_height, cfg.tile_width, cfg.tile_height,
                      cfg.overlap_x, cfg.overlap_y);
}

int cmd_tile(const RunConfig& cfg, std::ostream& out) {
    const TileGrid grid = grid_from(cfg);
    write_output(cfg, "grid.csv", grid.manifest_csv());
    out << grid.tiles().size() << " tiles (" << grid.columns() << " x " << grid.rows() << ")\n";
    return kOk;
}

int parse_tile_id(const std::string& image_id) {
    int id = -1;
    auto [ptr, ec] = std::from_chars(image_id.data(), image_id.data() + image_id.size(), id);
    if (ec != std::errc() || ptr != image_id.data() + image_id.size() || id < 0) {
        throw ValidationError("tile image_id '" + image_id + "' is not a tile id");
    }
    return id;
}

int cmd_merge(const RunConfig& cfg, std::ostream& out) {
    const Format format = selected_format(cfg);
    const TileGrid grid = grid_from(cfg);
    const DetectionSet tiles = load_detections(cfg.tiles_path, format);

    std::map<int, std::vector<ScoredBox>> per_tile;
    std::set<std::optional<int>> days;
    for (const auto& image : tiles.images()) {
        const int id = parse_tile_id(image.image_id);
        grid.tile(id);
        if (image.width != grid.tile_width() || image.height != grid.tile_height()) {
            throw ValidationError("tile image '" + image.image_id + "' is " + std::to_string(image.width) +
                                  "x" + std::to_string(image.height) + ", grid tiles are " +
                                  std::to_string(grid.tile_width()) + "x" +
                                  std::to_string(grid.tile_height()));
        }
        per_tile[id] = tiles.detections_for(image.image_id);
        days.insert(image.days_after_planting);
    }
    const auto merged = merge_tiles(grid, per_tile, cfg.seam_iou);

    ImageRecord mosaic{cfg.mosaic_id, cfg.mosaic_file.empty() ? cfg.mosaic_id : cfg.mosaic_file,
                       grid.mosaic_width(), grid.mosaic_height(),
                       days.size() == 1 ? *days.begin() : std::nullopt};
    const DetectionSet result({mosaic}, {{mosaic.image_id, merged}});
    save(fs::path(cfg.out_dir) / (format == Format::YoloTxtDir ? "merged" : "merged.json"), result, format);
    out << merged.size() << " detections after merging " << tiles.total_detections() << "\n";
    return kOk;
}

// ---------------------------------------------------------------- split

int cmd_split(const RunConfig& cfg, std::ostream& out) {
    if (cfg.ratios.size() != 3) {
        throw DomainError(ErrorCode::InvalidRatio, "--ratios takes exactly three values");
    }
    const GroundTruthSet gt = load_ground_truth(cfg.gt_path, selected_format(cfg));
    const auto parts = split_dataset(gt, {cfg.ratios[0], cfg.ratios[1], cfg.ratios[2]}, cfg.seed);
    write_output(cfg, "train.json", to_json(parts.train));
    write_output(cfg, "val.json", to_json(parts.validation));
    write_output(cfg, "test.json", to_json(parts.test));
    out << "train " << parts.train.images().size() << ", val " << parts.validation.images().size()
        << ", test " << parts.test.images().size() << "\n";
    return kOk;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
    using json = nlohmann::ordered_json;
    if (cfg.tiled) {
        TiledScenarioSpec spec = cfg.tiled_spec;
        spec.seed = cfg.seed;
        const TiledScenario s = generate_tiled(spec);
        write_output(cfg, "tiles_detections.json", to_json(tiles_as_detections(s)));
        write_output(cfg, "grid.csv", s.grid.manifest_csv());
        json truth;
        truth["true_count"] = s.truth.size();
        truth["seed"] = cfg.seed;
        write_output(cfg, "truth.json", truth.dump(2) + "\n");
        out << s.truth.size() << " panicles over " << s.grid.tiles().size() << " tiles\n";
        return kOk;
    }

    ScenarioSpec spec = cfg.noiseless ? cfg.scenario.noiseless() : cfg.scenario;
    spec.seed = cfg.seed;
    const Scenario s = generate(spec);
    char name[64];
    for (const auto& [day, gt] : s.ground_truth) {
        std::snprintf(name, sizeof name, "gt_d%03d.json", day);
        write_output(cfg, name, to_json(gt));
        std::snprintf(name, sizeof name, "det_d%03d.json", day);
        write_output(cfg, name, to_json(s.detections.at(day)));
    }
    write_output(cfg, "counts_true.csv", to_csv(s.true_counts));
    json truth;
    truth["true_flowering_day"] = s.true_flowering_day;
    truth["seed"] = spec.seed;
    truth["n_plants"] = spec.n_plants;
    truth["emergence_midpoint"] = spec.emergence_midpoint;
    truth["emergence_rate"] = spec.emergence_rate;
    truth["dates"] = spec.dates;
    truth["miss_rate"] = spec.miss_rate;
    truth["duplicate_rate"] = spec.duplicate_rate;
    truth["jitter_sd"] = spec.jitter_sd;
    truth["score_noise_sd"] = spec.score_noise_sd;
    write_output(cfg, "truth.json", truth.dump(2) + "\n");
    out << s.ground_truth.size() << " dates, true flowering day "
        << format_real(s.true_flowering_day) << "\n";
    return kOk;
}

void add_grid_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--mosaic-width", cfg.mosaic_width, "Mosaic width in pixels")->required();
    cmd->add_option("--mosaic-height", cfg.mosaic_height, "Mosaic height in pixels")->required();
    cmd->add_option("--tile-width", cfg.tile_width, "Tile width in pixels")->required();
    cmd->add_option("--tile-height", cfg.tile_height, "Tile height in pixels")->required();
    cmd->add_option("--overlap-x", cfg.overlap_x, "Horizontal tile overlap in pixels")->capture_default_str();
    cmd->add_option("--overlap-y", cfg.overlap_y, "Vertical tile overlap in pixels")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Panicle detection evaluation and flowering-time estimation", "panicle"};
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--format", cfg.format, "Interchange format of annotation/detection inputs")
        ->check(CLI::IsMember({"coco-like-json", "yolo-txt-dir"}))
        ->capture_default_str();
    app.add_option("--iou", cfg.iou_threshold, "IoU threshold for matching")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--score-floor", cfg.score_floor, "Minimum score for counted detections")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--min-area", cfg.min_area, "Minimum box area (px^2) for counted detections")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--seam-iou", cfg.seam_iou, "IoU above which seam duplicates are merged")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();

    auto* evaluate_cmd = app.add_subcommand("evaluate", "AP / MAPE / MAE / RMSE of detections");
    evaluate_cmd->add_option("ground_truth", cfg.gt_path, "Ground-truth document")->required();
    evaluate_cmd->add_option("detections", cfg.det_path, "Detection document")->required();
    evaluate_cmd->add_option("--ap-mode", cfg.ap_mode, "literal or interpolated precision")
        ->check(CLI::IsMember({"literal", "interpolated"}))
        ->capture_default_str();
    evaluate_cmd->add_option("--ap-score-floor", cfg.ap_score_floor, "Score floor for the AP ranking")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    evaluate_cmd->add_flag("--exclude-zero-gt", cfg.exclude_zero_gt,
                           "Leave images without ground truth out of the count metrics");

    auto* flowering_cmd = app.add_subcommand("flowering", "Fit the count curve and estimate flowering day");
    auto* counts_opt = flowering_cmd->add_option("--counts", cfg.counts_path, "Counts CSV");
    auto* det_opt = flowering_cmd->add_option("--detections", cfg.detection_paths,
                                              "Detection documents covering every flight date");
    flowering_cmd->add_option("--days-csv", cfg.days_csv,
                              "CSV image_id,days_after_planting overriding image records")
        ->needs(det_opt);
    counts_opt->excludes(det_opt);
    flowering_cmd->require_option(1);

    auto* tile_cmd = app.add_subcommand("tile", "Write the tile grid manifest");
    add_grid_flags(tile_cmd, cfg);

    auto* merge_cmd = app.add_subcommand("merge", "Merge per-tile detections into mosaic coordinates");
    merge_cmd->add_option("tiles", cfg.tiles_path, "Per-tile detections (image_id = tile id)")->required();
    add_grid_flags(merge_cmd, cfg);
    merge_cmd->add_option("--mosaic-id", cfg.mosaic_id, "image_id of the merged record")->capture_default_str();
    merge_cmd->add_option("--mosaic-file", cfg.mosaic_file, "file_name of the merged record");

    auto* split_cmd = app.add_subcommand("split", "Seeded train / validation / test split");
    split_cmd->add_option("ground_truth", cfg.gt_path, "Ground-truth document")->required();
    split_cmd->add_option("--ratios", cfg.ratios, "train val test fractions")
        ->expected(3)
        ->delimiter(',')
        ->capture_default_str();

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario with known truth");
    auto& sp = cfg.scenario;
    synth_cmd->add_option("--n-plants", sp.n_plants)->capture_default_str();
    synth_cmd->add_option("--field-width", sp.field_width)->capture_default_str();
    synth_cmd->add_option("--field-height", sp.field_height)->capture_default_str();
    synth_cmd->add_option("--emergence-midpoint", sp.emergence_midpoint)->capture_default_str();
    synth_cmd->add_option("--emergence-rate", sp.emergence_rate)->capture_default_str();
    synth_cmd->add_option("--dates", sp.dates)->delimiter(',')->capture_default_str();
    synth_cmd->add_option("--box-size-mean", sp.box_size_mean)->capture_default_str();
    synth_cmd->add_option("--box-size-sd", sp.box_size_sd)->capture_default_str();
    synth_cmd->add_option("--jitter-sd", sp.jitter_sd)->capture_default_str();
    synth_cmd->add_option("--duplicate-rate", sp.duplicate_rate)->capture_default_str();
    synth_cmd->add_option("--miss-rate", sp.miss_rate)->capture_default_str();
    synth_cmd->add_option("--score-noise-sd", sp.score_noise_sd)->capture_default_str();
    synth_cmd->add_flag("--noiseless", cfg.noiseless, "Switch every noise source off");
    auto& ts = cfg.tiled_spec;
    synth_cmd->add_flag("--tiled", cfg.tiled, "Generate a single-mosaic tile-merge scenario instead");
    synth_cmd->add_option("--n-panicles", ts.n_panicles)->capture_default_str();
    synth_cmd->add_option("--mosaic-width", ts.mosaic_width)->capture_default_str();
    synth_cmd->add_option("--mosaic-height", ts.mosaic_height)->capture_default_str();
    synth_cmd->add_option("--tile-width", ts.tile_width)->capture_default_str();
    synth_cmd->add_option("--tile-height", ts.tile_height)->capture_default_str();
    synth_cmd->add_option("--overlap-x", ts.overlap_x)->capture_default_str();
    synth_cmd->add_option("--overlap-y", ts.overlap_y)->capture_default_str();
    synth_cmd->add_option("--straddle-fraction", ts.straddle_fraction)->capture_default_str();

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "panicle: " << e.what() << "\n";
        return kValidationFailure;
    }

    try {
        if (*evaluate_cmd) return cmd_evaluate(cfg, out);
        if (*flowering_cmd) return cmd_flowering(cfg, out);
        if (*tile_cmd) return cmd_tile(cfg, out);
        if (*merge_cmd) return cmd_merge(cfg, out);
        if (*split_cmd) return cmd_split(cfg, out);
        if (*synth_cmd) return cmd_synth(cfg, out);
    } catch (const ParseError& e) {
        err << "panicle: parse error: " << e.what() << "\n";
        return kParseFailure;
    } catch (const ValidationError& e) {
        err << "panicle: validation error: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const DomainError& e) {
        err << "panicle: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const std::exception& e) {
        err << "panicle: " << e.what() << "\n";
        return kParseFailure;
    }
    return kValidationFailure;
}

}  // namespace panicle::cli
