#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hdcos/linalg.hpp"

namespace hdcos {

struct Dataset {
    Mat features;              // n x d, finite
    std::vector<int> labels;   // values in [0, classes)
    int classes = 0;
    std::string name;
    std::string split_tag;

    long n() const { return features.rows(); }
    long dim() const { return features.cols(); }
};

// IDX files (big-endian headers, u8 payload), plain or gzip-compressed.
// Pixels are scaled to [0, 1] and images flattened row-major.
Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path,
                       const std::string& name = "mnist");

// Class-conditional unit Gaussians with means placed pairwise `separation`
// apart. Deterministic per seed.
Dataset synth_gaussians(int n, int d, int classes, double separation, std::uint64_t seed);

Dataset subsample(const Dataset& ds, int n, std::uint64_t seed);
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double fraction, std::uint64_t seed);

}  // namespace hdcos
