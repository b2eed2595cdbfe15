#pragma once

#include "panicle/dataset.hpp"

#include <array>
#include <cstdint>

namespace panicle {

struct SplitRatios {
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;
};

struct DatasetSplit {
    GroundTruthSet train;
    GroundTruthSet validation;
    GroundTruthSet test;
};

/// Partition sizes: floor(n * ratio) per part, with the leftover images handed
/// out one at a time in train, validation, test order. Throws
/// DomainError(InvalidRatio) unless every ratio is positive and they sum to 1
/// within 1e-9.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios);

/// Sorts image ids, shuffles them with Rng(seed), then slices train /
/// validation / test. Each part keeps the input's image order.
DatasetSplit split_dataset(const GroundTruthSet& gt, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace panicle
