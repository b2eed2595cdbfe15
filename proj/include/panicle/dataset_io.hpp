#pragma once

#include "panicle/dataset.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace panicle {

enum class Format { CocoLikeJson, YoloTxtDir };

/// Accepts "coco-like-json" or "yolo-txt-dir"; throws ValidationError otherwise.
Format parse_format(std::string_view name);
std::string_view to_string(Format format) noexcept;

/// In-memory image of a yolo-txt-dir: the images.csv sidecar plus one label
/// text per image, keyed by image_id (the file stem).
struct YoloDocument {
    std::string images_csv;
    std::map<std::string, std::string> label_files;

    friend bool operator==(const YoloDocument&, const YoloDocument&) = default;
};

// coco-like-json
GroundTruthSet parse_ground_truth_json(std::string_view document);
DetectionSet parse_detections_json(std::string_view document);
std::string to_json(const GroundTruthSet& gt);
std::string to_json(const DetectionSet& det);

// yolo-txt-dir
GroundTruthSet parse_ground_truth_yolo(const YoloDocument& document);
DetectionSet parse_detections_yolo(const YoloDocument& document);
YoloDocument to_yolo(const GroundTruthSet& gt);
YoloDocument to_yolo(const DetectionSet& det);

YoloDocument read_yolo_dir(const std::filesystem::path& dir);
void write_yolo_dir(const std::filesystem::path& dir, const YoloDocument& document);

// counts CSV: header "days_after_planting,count".
CountSeries parse_count_series(std::string_view document);
std::string to_csv(const CountSeries& series);

// File-level helpers dispatching on format. A missing path raises ParseError
// naming the path.
GroundTruthSet load_ground_truth(const std::filesystem::path& path, Format format);
DetectionSet load_detections(const std::filesystem::path& path, Format format);
CountSeries load_count_series(const std::filesystem::path& path);
void save(const std::filesystem::path& path, const GroundTruthSet& gt, Format format);
void save(const std::filesystem::path& path, const DetectionSet& det, Format format);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Shortest decimal form that parses back to the same double.
std::string format_real(double value);

}  // namespace panicle
