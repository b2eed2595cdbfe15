#include "panicle/split.hpp"

#include "panicle/errors.hpp"
#include "panicle/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace panicle {

namespace {

GroundTruthSet subset(const GroundTruthSet& gt, const std::set<std::string>& ids) {
    std::vector<ImageRecord> images;
    std::map<std::string, std::vector<BoundingBox>> boxes;
    for (const auto& image : gt.images()) {
        if (!ids.contains(image.image_id)) continue;
        images.push_back(image);
        boxes[image.image_id] = gt.boxes_for(image.image_id);
    }
    return GroundTruthSet(std::move(images), std::move(boxes));
}

}  // namespace

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
    const std::array<double, 3> r{ratios.train, ratios.validation, ratios.test};
    for (double v : r) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(ErrorCode::InvalidRatio, "split ratios must be positive");
        }
    }
    const double sum = r[0] + r[1] + r[2];
    if (std::abs(sum - 1.0) > 1e-9) {
        throw DomainError(ErrorCode::InvalidRatio,
                          "split ratios must sum to 1, got " + std::to_string(sum));
    }
    std::array<std::size_t, 3> sizes{};
    std::size_t assigned = 0;
    for (int k = 0; k < 3; ++k) {
        // The epsilon keeps exact products such as 0.29 * 100 from flooring to 28.
        sizes[k] = static_cast<std::size_t>(std::floor(static_cast<double>(n) * r[k] + 1e-9));
        sizes[k] = std::min(sizes[k], n - assigned);
        assigned += sizes[k];
    }
    for (int k = 0; assigned < n; k = (k + 1) % 3, ++assigned) ++sizes[k];
    return sizes;
}

DatasetSplit split_dataset(const GroundTruthSet& gt, const SplitRatios& ratios, std::uint64_t seed) {
    const auto sizes = split_sizes(gt.images().size(), ratios);
    std::vector<std::string> ids;
    ids.reserve(gt.images().size());
    for (const auto& image : gt.images()) ids.push_back(image.image_id);
    std::sort(ids.begin(), ids.end());
    Rng rng(seed);
    rng.shuffle(ids);

    std::array<std::set<std::string>, 3> parts;
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) {
        parts[k].insert(ids.begin() + static_cast<std::ptrdiff_t>(pos),
                        ids.begin() + static_cast<std::ptrdiff_t>(pos + sizes[k]));
        pos += sizes[k];
    }
    return {subset(gt, parts[0]), subset(gt, parts[1]), subset(gt, parts[2])};
}

}  // namespace panicle
