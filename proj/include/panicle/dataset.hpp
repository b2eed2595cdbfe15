#pragma once

#include "panicle/geometry.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace panicle {

struct ImageRecord {
    std::string image_id;
    std::string file_name;
    int width = 0;
    int height = 0;
    std::optional<int> days_after_planting;

    friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

/// Annotated images. Every box lies inside its image; image ids are unique.
class GroundTruthSet {
public:
    GroundTruthSet() = default;
    /// Throws ValidationError on duplicate ids, unknown ids in `boxes`, or
    /// out-of-bounds boxes. Images without an entry get an empty list.
    GroundTruthSet(std::vector<ImageRecord> images,
                   std::map<std::string, std::vector<BoundingBox>> boxes);

    const std::vector<ImageRecord>& images() const noexcept { return images_; }
    const std::vector<BoundingBox>& boxes_for(const std::string& image_id) const;
    const ImageRecord* find_image(const std::string& image_id) const;
    std::size_t total_boxes() const noexcept;

    friend bool operator==(const GroundTruthSet&, const GroundTruthSet&) = default;

private:
    std::vector<ImageRecord> images_;
    std::map<std::string, std::vector<BoundingBox>> boxes_;
};

/// Scored detections per image. Boxes are not required to lie inside the image.
class DetectionSet {
public:
    DetectionSet() = default;
    DetectionSet(std::vector<ImageRecord> images,
                 std::map<std::string, std::vector<ScoredBox>> detections);

    const std::vector<ImageRecord>& images() const noexcept { return images_; }
    const std::vector<ScoredBox>& detections_for(const std::string& image_id) const;
    const ImageRecord* find_image(const std::string& image_id) const;
    std::size_t total_detections() const noexcept;

    /// Same set with every per-image list sorted by `ranks_before`.
    DetectionSet canonicalized() const;

    friend bool operator==(const DetectionSet&, const DetectionSet&) = default;

private:
    std::vector<ImageRecord> images_;
    std::map<std::string, std::vector<ScoredBox>> detections_;
};

struct Observation {
    int days_after_planting = 0;
    std::int64_t count = 0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Panicle counts per flight date, strictly increasing in days.
class CountSeries {
public:
    CountSeries() = default;
    /// Throws ValidationError on negative values or non-increasing days.
    explicit CountSeries(std::vector<Observation> observations);

    const std::vector<Observation>& observations() const noexcept { return observations_; }
    std::size_t size() const noexcept { return observations_.size(); }
    bool empty() const noexcept { return observations_.empty(); }

    friend bool operator==(const CountSeries&, const CountSeries&) = default;

private:
    std::vector<Observation> observations_;
};

}  // namespace panicle
