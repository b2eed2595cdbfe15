#include "panicle/dataset.hpp"

#include "panicle/errors.hpp"

#include <algorithm>
#include <set>

namespace panicle {

namespace {

void validate_images(const std::vector<ImageRecord>& images) {
    std::set<std::string> seen;
    for (const auto& image : images) {
        if (image.image_id.empty()) throw ValidationError("empty image_id");
        if (image.width <= 0 || image.height <= 0) {
            throw ValidationError("image '" + image.image_id + "' has non-positive dimensions");
        }
        if (image.days_after_planting && *image.days_after_planting < 0) {
            throw ValidationError("image '" + image.image_id + "' has negative days_after_planting");
        }
        if (!seen.insert(image.image_id).second) {
            throw ValidationError("duplicate image_id '" + image.image_id + "'");
        }
    }
}

template <typename T>
void fill_and_check_keys(const std::vector<ImageRecord>& images,
                         std::map<std::string, std::vector<T>>& by_image) {
    std::set<std::string> ids;
    for (const auto& image : images) ids.insert(image.image_id);
    for (const auto& [id, list] : by_image) {
        if (!ids.contains(id)) {
            throw ValidationError("annotation references unknown image_id '" + id + "'");
        }
    }
    for (const auto& image : images) by_image.try_emplace(image.image_id);
}

template <typename Images>
const ImageRecord* find_in(const Images& images, const std::string& image_id) {
    auto it = std::find_if(images.begin(), images.end(),
                           [&](const ImageRecord& r) { return r.image_id == image_id; });
    return it == images.end() ? nullptr : &*it;
}

}  // namespace

GroundTruthSet::GroundTruthSet(std::vector<ImageRecord> images,
                               std::map<std::string, std::vector<BoundingBox>> boxes)
    : images_(std::move(images)), boxes_(std::move(boxes)) {
    validate_images(images_);
    fill_and_check_keys(images_, boxes_);
    for (const auto& image : images_) {
        for (const auto& b : boxes_.at(image.image_id)) {
            if (!b.within(0.0, 0.0, image.width, image.height)) {
                throw ValidationError("box outside bounds of image '" + image.image_id + "'");
            }
        }
    }
}

const std::vector<BoundingBox>& GroundTruthSet::boxes_for(const std::string& image_id) const {
    auto it = boxes_.find(image_id);
    if (it == boxes_.end()) throw ValidationError("unknown image_id '" + image_id + "'");
    return it->second;
}

const ImageRecord* GroundTruthSet::find_image(const std::string& image_id) const {
    return find_in(images_, image_id);
}

std::size_t GroundTruthSet::total_boxes() const noexcept {
    std::size_t n = 0;
    for (const auto& [id, list] : boxes_) n += list.size();
    return n;
}

DetectionSet::DetectionSet(std::vector<ImageRecord> images,
                           std::map<std::string, std::vector<ScoredBox>> detections)
    : images_(std::move(images)), detections_(std::move(detections)) {
    validate_images(images_);
    fill_and_check_keys(images_, detections_);
}

const std::vector<ScoredBox>& DetectionSet::detections_for(const std::string& image_id) const {
    auto it = detections_.find(image_id);
    if (it == detections_.end()) throw ValidationError("unknown image_id '" + image_id + "'");
    return it->second;
}

const ImageRecord* DetectionSet::find_image(const std::string& image_id) const {
    return find_in(images_, image_id);
}

std::size_t DetectionSet::total_detections() const noexcept {
    std::size_t n = 0;
    for (const auto& [id, list] : detections_) n += list.size();
    return n;
}

DetectionSet DetectionSet::canonicalized() const {
    DetectionSet out = *this;
    for (auto& [id, list] : out.detections_) std::stable_sort(list.begin(), list.end(), ranks_before);
    return out;
}

CountSeries::CountSeries(std::vector<Observation> observations)
    : observations_(std::move(observations)) {
    for (std::size_t i = 0; i < observations_.size(); ++i) {
        const auto& o = observations_[i];
        if (o.days_after_planting < 0) throw ValidationError("negative days_after_planting");
        if (o.count < 0) throw ValidationError("negative count");
        if (i > 0 && o.days_after_planting <= observations_[i - 1].days_after_planting) {
            throw ValidationError("days_after_planting must be strictly increasing (day " +
                                  std::to_string(o.days_after_planting) + " follows day " +
                                  std::to_string(observations_[i - 1].days_after_planting) + ")");
        }
    }
}

}  // namespace panicle
