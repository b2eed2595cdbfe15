#include "panicle/dataset_io.hpp"

#include "panicle/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace panicle {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kImagesCsvHeader =
    "image_id,file_name,width,height,days_after_planting";
constexpr std::string_view kCountsHeader = "days_after_planting,count";

// Normalized coordinates are allowed to overshoot an image edge by this
// fraction of the image size before the box is rejected as out of bounds.
constexpr double kNormalizedEdgeSlack = 1e-9;

// ---------------------------------------------------------------- text utils

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

/// Splits into LF-terminated lines, dropping a trailing CR from each line and
/// the empty remainder after a final LF.
std::vector<std::string_view> lines_of(std::string_view text) {
    auto lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    for (auto& line : lines) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    }
    return lines;
}

std::vector<std::string_view> tokens_of(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::optional<double> to_real(std::string_view token) {
    double value = 0.0;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

template <typename Int>
std::optional<Int> to_integer(std::string_view token) {
    Int value = 0;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return value;
}

void check_field_text(std::string_view value, std::string_view what) {
    if (value.find_first_of(",\n\r\"") != std::string_view::npos) {
        throw ValidationError(std::string(what) + " '" + std::string(value) +
                              "' contains a character not allowed in CSV fields");
    }
}

void check_image_id_is_file_stem(const std::string& id) {
    if (id == "." || id == ".." || id.find_first_of("/\\") != std::string::npos ||
        id.find('\0') != std::string::npos) {
        throw ValidationError("image_id '" + id + "' cannot be used as a label file name");
    }
}

// ---------------------------------------------------------------- coco-like-json

json parse_json_document(std::string_view document) {
    try {
        return json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), 0, e.byte);
    } catch (const json::exception& e) {
        // Number overflow while lexing surfaces as out_of_range.
        throw ParseError(std::string("malformed JSON: ") + e.what(), 0);
    }
}

const json& required(const json& object, const char* key, const std::string& context) {
    auto it = object.find(key);
    if (it == object.end()) {
        throw ValidationError(context + ": missing required field \"" + key + "\"");
    }
    return *it;
}

std::int64_t as_int(const json& value, const char* key, const std::string& context) {
    if (value.is_number_unsigned()) {
        const auto u = value.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
            throw ValidationError(context + ": field \"" + key + "\" out of range");
        }
        return static_cast<std::int64_t>(u);
    }
    if (value.is_number_integer()) return value.get<std::int64_t>();
    throw ValidationError(context + ": field \"" + key + "\" must be an integer");
}

double as_real(const json& value, const char* key, const std::string& context) {
    if (!value.is_number()) {
        throw ValidationError(context + ": field \"" + key + "\" must be a number");
    }
    const double v = value.get<double>();
    if (!std::isfinite(v)) throw ValidationError(context + ": field \"" + key + "\" is not finite");
    return v;
}

std::vector<ImageRecord> images_from_json(const json& root) {
    if (!root.is_object()) throw ValidationError("document root must be a JSON object");
    const json& images = required(root, "images", "document");
    if (!images.is_array()) throw ValidationError("\"images\" must be an array");
    std::vector<ImageRecord> out;
    out.reserve(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string context = "images[" + std::to_string(i) + "]";
        const json& entry = images[i];
        if (!entry.is_object()) throw ValidationError(context + " must be an object");
        const json& id = required(entry, "id", context);
        const json& file_name = required(entry, "file_name", context);
        if (!id.is_string()) throw ValidationError(context + ": \"id\" must be a string");
        if (!file_name.is_string()) throw ValidationError(context + ": \"file_name\" must be a string");
        ImageRecord record;
        record.image_id = id.get<std::string>();
        record.file_name = file_name.get<std::string>();
        const auto width = as_int(required(entry, "width", context), "width", context);
        const auto height = as_int(required(entry, "height", context), "height", context);
        if (width <= 0 || height <= 0 || width > std::numeric_limits<int>::max() ||
            height > std::numeric_limits<int>::max()) {
            throw ValidationError(context + ": width and height must be positive integers");
        }
        record.width = static_cast<int>(width);
        record.height = static_cast<int>(height);
        if (auto it = entry.find("days_after_planting"); it != entry.end() && !it->is_null()) {
            const auto days = as_int(*it, "days_after_planting", context);
            if (days < 0 || days > std::numeric_limits<int>::max()) {
                throw ValidationError(context + ": days_after_planting must be a non-negative integer");
            }
            record.days_after_planting = static_cast<int>(days);
        }
        out.push_back(std::move(record));
    }
    return out;
}

struct RawAnnotation {
    std::string image_id;
    BoundingBox box;
    std::optional<double> score;
    std::string context;
};

std::vector<RawAnnotation> annotations_from_json(const json& root) {
    const json& annotations = required(root, "annotations", "document");
    if (!annotations.is_array()) throw ValidationError("\"annotations\" must be an array");
    std::vector<RawAnnotation> out;
    out.reserve(annotations.size());
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        const std::string context = "annotations[" + std::to_string(i) + "]";
        const json& entry = annotations[i];
        if (!entry.is_object()) throw ValidationError(context + " must be an object");
        const json& image_id = required(entry, "image_id", context);
        if (!image_id.is_string()) throw ValidationError(context + ": \"image_id\" must be a string");
        const json& bbox = required(entry, "bbox", context);
        if (!bbox.is_array() || bbox.size() != 4) {
            throw ValidationError(context + ": \"bbox\" must be [x, y, w, h]");
        }
        double v[4];
        for (std::size_t k = 0; k < 4; ++k) v[k] = as_real(bbox[k], "bbox", context);
        std::optional<double> score;
        if (auto it = entry.find("score"); it != entry.end()) score = as_real(*it, "score", context);
        try {
            out.push_back({image_id.get<std::string>(), BoundingBox::from_xywh(v[0], v[1], v[2], v[3]),
                           score, context});
        } catch (const ValidationError& e) {
            throw ValidationError(context + ": " + e.what());
        }
    }
    return out;
}

json image_to_json(const ImageRecord& r) {
    json j;
    j["id"] = r.image_id;
    j["file_name"] = r.file_name;
    j["width"] = r.width;
    j["height"] = r.height;
    if (r.days_after_planting) j["days_after_planting"] = *r.days_after_planting;
    return j;
}

json bbox_to_json(const BoundingBox& b) {
    return json::array({b.x_min(), b.y_min(), b.width(), b.height()});
}

// ---------------------------------------------------------------- yolo-txt-dir

std::vector<ImageRecord> images_from_csv(std::string_view csv) {
    const auto lines = lines_of(csv);
    if (lines.empty() || lines.front() != kImagesCsvHeader) {
        throw ParseError("images.csv must start with header \"" + std::string(kImagesCsvHeader) + "\"",
                         1);
    }
    std::vector<ImageRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto fields = split(lines[i], ',');
        if (fields.size() != 5) throw ParseError("images.csv: expected 5 fields", line_no);
        ImageRecord r;
        r.image_id = std::string(fields[0]);
        r.file_name = std::string(fields[1]);
        const auto w = to_integer<int>(fields[2]);
        const auto h = to_integer<int>(fields[3]);
        if (!w || !h) throw ParseError("images.csv: width/height must be integers", line_no);
        r.width = *w;
        r.height = *h;
        if (!fields[4].empty()) {
            const auto d = to_integer<int>(fields[4]);
            if (!d) throw ParseError("images.csv: days_after_planting must be an integer", line_no);
            r.days_after_planting = *d;
        }
        if (r.width <= 0 || r.height <= 0) {
            throw ValidationError("images.csv line " + std::to_string(line_no) +
                                  ": width and height must be positive");
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string images_to_csv(const std::vector<ImageRecord>& images) {
    std::string out(kImagesCsvHeader);
    out += '\n';
    for (const auto& r : images) {
        check_field_text(r.image_id, "image_id");
        check_field_text(r.file_name, "file_name");
        check_image_id_is_file_stem(r.image_id);
        out += r.image_id + ',' + r.file_name + ',' + std::to_string(r.width) + ',' +
               std::to_string(r.height) + ',';
        if (r.days_after_planting) out += std::to_string(*r.days_after_planting);
        out += '\n';
    }
    return out;
}

double denormalize_edge(double value, int extent, const std::string& where) {
    const double px = value * extent;
    const double slack = kNormalizedEdgeSlack * extent;
    if (px < 0.0) {
        if (px < -slack) throw ValidationError(where + ": box extends past the image edge");
        return 0.0;
    }
    if (px > extent) {
        if (px > extent + slack) throw ValidationError(where + ": box extends past the image edge");
        return extent;
    }
    return px;
}

struct YoloLine {
    BoundingBox box;
    std::optional<double> score;
};

std::vector<YoloLine> parse_label_file(std::string_view text, const ImageRecord& image,
                                       bool with_score) {
    const std::size_t expected = with_score ? 6 : 5;
    std::vector<YoloLine> out;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto tokens = tokens_of(lines[i]);
        if (tokens.empty()) continue;
        const std::string where = image.image_id + ".txt line " + std::to_string(line_no);
        if (tokens.size() != expected) {
            throw ParseError(image.image_id + ".txt: expected " + std::to_string(expected) +
                                 " fields, got " + std::to_string(tokens.size()),
                             line_no);
        }
        if (!to_integer<int>(tokens[0]) || *to_integer<int>(tokens[0]) < 0) {
            throw ParseError(image.image_id + ".txt: class must be a non-negative integer", line_no);
        }
        double v[5] = {0, 0, 0, 0, 0};
        for (std::size_t k = 1; k < expected; ++k) {
            const auto value = to_real(tokens[k]);
            if (!value) throw ParseError(image.image_id + ".txt: malformed number", line_no);
            v[k - 1] = *value;
        }
        for (int k = 0; k < 4; ++k) {
            if (v[k] < 0.0 || v[k] > 1.0) {
                throw ValidationError(where + ": normalized coordinate outside [0, 1]");
            }
        }
        const double x0 = denormalize_edge(v[0] - v[2] / 2.0, image.width, where);
        const double x1 = denormalize_edge(v[0] + v[2] / 2.0, image.width, where);
        const double y0 = denormalize_edge(v[1] - v[3] / 2.0, image.height, where);
        const double y1 = denormalize_edge(v[1] + v[3] / 2.0, image.height, where);
        try {
            out.push_back({BoundingBox(x0, y0, x1, y1),
                           with_score ? std::optional<double>(v[4]) : std::nullopt});
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    return out;
}

std::string yolo_line(const BoundingBox& b, const ImageRecord& image) {
    const double w = image.width;
    const double h = image.height;
    return "0 " + format_real((b.x_min() + b.x_max()) / 2.0 / w) + ' ' +
           format_real((b.y_min() + b.y_max()) / 2.0 / h) + ' ' + format_real(b.width() / w) + ' ' +
           format_real(b.height() / h);
}

void check_label_keys(const YoloDocument& document, const std::vector<ImageRecord>& images) {
    for (const auto& [id, text] : document.label_files) {
        const bool known = std::any_of(images.begin(), images.end(),
                                       [&](const ImageRecord& r) { return r.image_id == id; });
        if (!known) throw ValidationError("label file '" + id + ".txt' has no entry in images.csv");
    }
}

}  // namespace

Format parse_format(std::string_view name) {
    if (name == "coco-like-json") return Format::CocoLikeJson;
    if (name == "yolo-txt-dir") return Format::YoloTxtDir;
    throw ValidationError("unknown format '" + std::string(name) +
                          "' (expected coco-like-json or yolo-txt-dir)");
}

std::string_view to_string(Format format) noexcept {
    return format == Format::CocoLikeJson ? "coco-like-json" : "yolo-txt-dir";
}

std::string format_real(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

GroundTruthSet parse_ground_truth_json(std::string_view document) {
    const json root = parse_json_document(document);
    auto images = images_from_json(root);
    std::map<std::string, std::vector<BoundingBox>> boxes;
    for (auto& a : annotations_from_json(root)) boxes[a.image_id].push_back(a.box);
    return GroundTruthSet(std::move(images), std::move(boxes));
}

DetectionSet parse_detections_json(std::string_view document) {
    const json root = parse_json_document(document);
    auto images = images_from_json(root);
    std::map<std::string, std::vector<ScoredBox>> detections;
    for (auto& a : annotations_from_json(root)) {
        if (!a.score) throw ValidationError(a.context + ": missing required field \"score\"");
        try {
            detections[a.image_id].emplace_back(a.box, *a.score);
        } catch (const ValidationError& e) {
            throw ValidationError(a.context + ": " + e.what());
        }
    }
    return DetectionSet(std::move(images), std::move(detections));
}

std::string to_json(const GroundTruthSet& gt) {
    json root;
    root["images"] = json::array();
    root["annotations"] = json::array();
    for (const auto& image : gt.images()) {
        root["images"].push_back(image_to_json(image));
        for (const auto& b : gt.boxes_for(image.image_id)) {
            json a;
            a["image_id"] = image.image_id;
            a["bbox"] = bbox_to_json(b);
            root["annotations"].push_back(std::move(a));
        }
    }
    return root.dump(2) + "\n";
}

std::string to_json(const DetectionSet& det) {
    json root;
    root["images"] = json::array();
    root["annotations"] = json::array();
    for (const auto& image : det.images()) {
        root["images"].push_back(image_to_json(image));
        for (const auto& d : det.detections_for(image.image_id)) {
            json a;
            a["image_id"] = image.image_id;
            a["bbox"] = bbox_to_json(d.box());
            a["score"] = d.score();
            root["annotations"].push_back(std::move(a));
        }
    }
    return root.dump(2) + "\n";
}

GroundTruthSet parse_ground_truth_yolo(const YoloDocument& document) {
    auto images = images_from_csv(document.images_csv);
    check_label_keys(document, images);
    std::map<std::string, std::vector<BoundingBox>> boxes;
    for (const auto& image : images) {
        auto it = document.label_files.find(image.image_id);
        if (it == document.label_files.end()) continue;
        for (auto& line : parse_label_file(it->second, image, false)) {
            boxes[image.image_id].push_back(line.box);
        }
    }
    return GroundTruthSet(std::move(images), std::move(boxes));
}

DetectionSet parse_detections_yolo(const YoloDocument& document) {
    auto images = images_from_csv(document.images_csv);
    check_label_keys(document, images);
    std::map<std::string, std::vector<ScoredBox>> detections;
    for (const auto& image : images) {
        auto it = document.label_files.find(image.image_id);
        if (it == document.label_files.end()) continue;
        for (auto& line : parse_label_file(it->second, image, true)) {
            try {
                detections[image.image_id].emplace_back(line.box, *line.score);
            } catch (const ValidationError& e) {
                throw ValidationError(image.image_id + ".txt: " + e.what());
            }
        }
    }
    return DetectionSet(std::move(images), std::move(detections));
}

YoloDocument to_yolo(const GroundTruthSet& gt) {
    YoloDocument doc;
    doc.images_csv = images_to_csv(gt.images());
    for (const auto& image : gt.images()) {
        std::string text;
        for (const auto& b : gt.boxes_for(image.image_id)) text += yolo_line(b, image) + '\n';
        doc.label_files[image.image_id] = std::move(text);
    }
    return doc;
}

YoloDocument to_yolo(const DetectionSet& det) {
    YoloDocument doc;
    doc.images_csv = images_to_csv(det.images());
    for (const auto& image : det.images()) {
        std::string text;
        for (const auto& d : det.detections_for(image.image_id)) {
            text += yolo_line(d.box(), image) + ' ' + format_real(d.score()) + '\n';
        }
        doc.label_files[image.image_id] = std::move(text);
    }
    return doc;
}

YoloDocument read_yolo_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ParseError("not a directory: " + dir.string(), 0);
    YoloDocument doc;
    doc.images_csv = read_text_file(dir / "images.csv");
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        doc.label_files[entry.path().stem().string()] = read_text_file(entry.path());
    }
    return doc;
}

void write_yolo_dir(const fs::path& dir, const YoloDocument& document) {
    fs::create_directories(dir);
    write_text_file(dir / "images.csv", document.images_csv);
    for (const auto& [id, text] : document.label_files) write_text_file(dir / (id + ".txt"), text);
}

CountSeries parse_count_series(std::string_view document) {
    const auto lines = lines_of(document);
    if (lines.empty() || lines.front() != kCountsHeader) {
        throw ParseError("counts CSV must start with header \"" + std::string(kCountsHeader) + "\"", 1);
    }
    std::vector<Observation> observations;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto fields = split(lines[i], ',');
        if (fields.size() != 2) throw ParseError("counts CSV: expected 2 fields", line_no);
        const auto day = to_integer<int>(fields[0]);
        const auto count = to_integer<std::int64_t>(fields[1]);
        if (!day || !count) throw ParseError("counts CSV: fields must be integers", line_no);
        observations.push_back({*day, *count});
    }
    try {
        return CountSeries(std::move(observations));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("counts CSV: ") + e.what());
    }
}

std::string to_csv(const CountSeries& series) {
    std::string out(kCountsHeader);
    out += '\n';
    for (const auto& o : series.observations()) {
        out += std::to_string(o.days_after_planting) + ',' + std::to_string(o.count) + '\n';
    }
    return out;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path.string(), 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

GroundTruthSet load_ground_truth(const fs::path& path, Format format) {
    if (format == Format::YoloTxtDir) return parse_ground_truth_yolo(read_yolo_dir(path));
    return parse_ground_truth_json(read_text_file(path));
}

DetectionSet load_detections(const fs::path& path, Format format) {
    if (format == Format::YoloTxtDir) return parse_detections_yolo(read_yolo_dir(path));
    return parse_detections_json(read_text_file(path));
}

CountSeries load_count_series(const fs::path& path) {
    return parse_count_series(read_text_file(path));
}

void save(const fs::path& path, const GroundTruthSet& gt, Format format) {
    if (format == Format::YoloTxtDir) {
        write_yolo_dir(path, to_yolo(gt));
    } else {
        write_text_file(path, to_json(gt));
    }
}

void save(const fs::path& path, const DetectionSet& det, Format format) {
    if (format == Format::YoloTxtDir) {
        write_yolo_dir(path, to_yolo(det));
    } else {
        write_text_file(path, to_json(det));
    }
}

}  // namespace panicle
